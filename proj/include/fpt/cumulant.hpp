#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fpt/innovations.hpp"

namespace fpt {

enum class CumulantMode { series, closed_form_stable, closed_form_deterministic };

struct SeriesControls {
  double abs_term_floor = 1e-12;
  std::size_t k_max = 10000;
};

struct PhiValue {
  double value = 0.0;
  double abs_err = 0.0;
  std::size_t terms = 0;
};

/// phi(u) = sum_k psi(lambda^k u), the cumulant of the stationary law.
class LimitCumulant {
 public:
  /// Uses a closed form when the family has one, the series otherwise.
  LimitCumulant(InnovationSpec spec, double lambda);
  LimitCumulant(InnovationSpec spec, double lambda, CumulantMode mode,
                SeriesControls controls = {});

  const InnovationSpec& spec() const { return spec_; }
  double lambda() const { return lambda_; }
  CumulantMode mode() const { return mode_; }
  const SeriesControls& controls() const { return controls_; }

  PhiValue phi(double u) const;
  double operator()(double u) const { return phi(u).value; }
  double psi(double u) const { return spec_.psi(u); }

 private:
  PhiValue series(double u) const;

  InnovationSpec spec_;
  double lambda_;
  CumulantMode mode_;
  SeriesControls controls_;
};

bool has_closed_form(const InnovationSpec& spec, CumulantMode mode);

/// max over the grid of |phi(u) - phi(lambda u) - psi(u)|.
double check_functional_equation(const LimitCumulant& lc, const std::vector<double>& u_grid);

struct SlopeReport {
  double slope_estimate = 0.0;
  std::optional<double> theoretical_slope;
  bool superlinear = false;
  std::vector<double> probes;
  std::vector<double> ratios;    // phi(u) / u
  std::vector<double> deficits;  // theoretical_slope - phi(u) / u
  bool deficit_nonnegative = true;
  bool deficit_nonincreasing = true;
};

SlopeReport slope_probe(const LimitCumulant& lc, const std::vector<double>& u_probes);

struct StationaryMoments {
  double mean = 0.0;
  std::optional<double> variance;
};

/// Mean m / (1 - lambda) and variance Var / (1 - lambda^2) of the stationary law.
std::optional<StationaryMoments> stationary_reference(const InnovationSpec& spec, double lambda);

}  // namespace fpt
