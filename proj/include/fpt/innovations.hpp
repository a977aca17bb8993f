#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpt/rng.hpp"

namespace fpt {

class InnovationSpec;

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};

struct Deterministic {
  double value = 0.0;
};

struct TwoPoint {
  double high = 1.0;
  double low = -1.0;
  double p_high = 0.5;
};

/// Totally negatively skewed stable law, psi(u) = m u + sgn(alpha - 1) C u^alpha.
/// alpha in (0, 1) is accepted for cumulant work only.
struct StableNegative {
  double alpha = 2.0;
  double scale = 0.5;
  double shift = 0.0;
};

/// min(eta, cap).
struct CappedAbove {
  std::shared_ptr<const InnovationSpec> base;
  double cap = 0.0;
};

/// eta 1{eta <= 0} + level 1{eta >= level}; values in (0, level) become 0.
struct FlooredPositive {
  std::shared_ptr<const InnovationSpec> base;
  double level = 1.0;
};

using Family = std::variant<Gaussian, Deterministic, TwoPoint, StableNegative,
                            CappedAbove, FlooredPositive>;

namespace detail {
struct Law;
}

struct Atom {
  double x;
  double w;
};

class InnovationSpec {
 public:
  static InnovationSpec gaussian(double mean, double variance);
  static InnovationSpec deterministic(double value);
  static InnovationSpec two_point(double high, double low, double p_high);
  static InnovationSpec stable(double alpha, double scale, double shift);

  const Family& family() const { return family_; }
  std::string name() const;
  std::string describe() const;

  /// E e^{u eta} < infinity for every u >= 0. True for the whole registry.
  bool mgf_domain_note() const { return true; }

  /// log E e^{u eta}, u >= 0.
  double psi(double u) const;

  double draw(Stream& rng) const;
  std::vector<double> sample(Stream& rng, std::size_t n) const;
  bool can_sample() const;

  std::optional<double> upper_bound() const;
  std::optional<double> mean() const;
  std::optional<double> variance() const;
  /// Natural size of the innovation: standard deviation, |c|, or the stable sigma.
  double scale() const;

  /// P(eta > x) and P(eta >= x).
  double survival(double x) const;
  double mass_at_least(double x) const;
  /// Smallest x with P(eta > x) <= p (bisection on the survival function).
  double upper_quantile(double p) const;

  bool is_discrete() const;
  /// Atoms of a purely discrete law, ascending.
  std::vector<Atom> atoms() const;
  /// Equivalent registry family when the law collapses to one or two atoms.
  InnovationSpec simplified() const;

  /// E g(eta). Gauss-Hermite for plain Gaussians, atom sums for discrete
  /// laws, adaptive quadrature against the density otherwise.
  double expect(const std::function<double(double)>& g) const;

  const detail::Law& law() const;

 private:
  InnovationSpec(Family family, std::shared_ptr<const detail::Law> law);
  friend InnovationSpec truncate_cap_above(const InnovationSpec&, double);
  friend InnovationSpec truncate_floor_positive(const InnovationSpec&, double);

  Family family_;
  std::shared_ptr<const detail::Law> law_;
};

InnovationSpec truncate_cap_above(const InnovationSpec& spec, double cap);
InnovationSpec truncate_floor_positive(const InnovationSpec& spec, double level);

struct TailDiagnostics {
  double log_moment = 0.0;
  double log_moment_se = 0.0;
  double delta = 0.5;
  double neg_moment = 0.0;
  double neg_moment_se = 0.0;
  std::optional<double> upper_bound;
  bool exact = false;
};

TailDiagnostics diagnostics(const InnovationSpec& spec, Stream& rng, std::size_t n,
                            double delta = 0.5);

}  // namespace fpt
