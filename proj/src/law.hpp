#pragma once

// Internal representation of an innovation law: finitely many atoms plus,
// optionally, a continuous base density restricted to (-inf, upper).

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "fpt/innovations.hpp"
#include "fpt/quadrature.hpp"

namespace fpt::detail {

class ContinuousBase {
 public:
  virtual ~ContinuousBase() = default;
  virtual double density(double x) const = 0;
  virtual double survival(double x) const = 0;
  /// Unrestricted cumulant of the base law.
  virtual double psi(double u) const = 0;
  virtual double mean() const = 0;
  /// E eta^2 when finite, else infinity.
  virtual double second_moment() const = 0;
  virtual double center() const = 0;
  virtual double spread() const = 0;
  /// Gaussian-type left tail: mass below center - 40 spread is negligible.
  virtual bool light_left() const = 0;
  /// log E[e^{u eta}; eta < t] in closed form, when the family has one.
  virtual std::optional<double> log_partial_mgf(double /*u*/, double /*t*/) const {
    return std::nullopt;
  }
};

struct Law {
  std::vector<Atom> atoms;  // ascending, merged
  std::shared_ptr<const ContinuousBase> base;
  double upper = std::numeric_limits<double>::infinity();

  bool discrete() const { return !base; }
  double top() const;
  double atom_mass() const;
  double survival(double x) const;
  double mass_at_least(double x) const;
};

/// Integral of g(y) f(y) over (from, to) against the base density.
double integrate_density(const ContinuousBase& base, const std::function<double(double)>& g,
                         double from, double to, quad::Tolerance tol);

}  // namespace fpt::detail
