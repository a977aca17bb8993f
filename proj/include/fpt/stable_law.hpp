#pragma once

#include "fpt/rng.hpp"

namespace fpt {

/// Totally negatively skewed stable law with log E e^{u eta} = m u + C u^alpha,
/// alpha in (1, 2]. Density and survival use the integral representations of
/// Nolan (1997), which are free of oscillation; the far left tail switches to
/// the convergent-in-practice asymptotic series.
class StableLaw {
 public:
  StableLaw(double alpha, double scale_c, double shift);

  double alpha() const { return alpha_; }
  double sigma() const { return sigma_; }
  double shift() const { return shift_; }

  double density(double x) const;
  /// P(eta > x).
  double survival(double x) const;
  /// Chambers-Mallows-Stuck draw.
  double draw(Stream& rng) const;

 private:
  double standard_density(double z) const;   // z in the S0 scale
  double standard_survival(double z) const;
  double left_tail_density(double r) const;  // eta density at shift - r
  double left_tail_cdf(double r) const;      // P(eta < shift - r)

  double alpha_;
  double scale_c_;
  double shift_;
  double sigma_;
  double zeta_;
  double asymptotic_cutoff_;
};

}  // namespace fpt
