#include "fpt/stable_law.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fpt/error.hpp"
#include "fpt/quadrature.hpp"

namespace fpt {
namespace {

constexpr double kPi = std::numbers::pi;

double normal_survival(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// V(theta) of the integral representation written in phi = pi/2 - theta.
// `right` selects beta = -1 (points right of zeta); otherwise the mirrored
// beta = +1 branch used left of zeta.
double v_function(double alpha, double phi, bool right) {
  const double a1 = alpha - 1.0;
  const double lead = std::pow(-std::cos(kPi * alpha / 2.0), 1.0 / a1);
  const double sphi = std::sin(phi);
  if (right) {
    const double s = std::sin(alpha * phi);
    if (s <= 0.0) return std::numeric_limits<double>::infinity();
    return lead * std::pow(sphi / s, alpha / a1) * std::sin(a1 * phi) / sphi;
  }
  const double omega = kPi - kPi / alpha - phi;
  const double s = std::sin(alpha * omega);
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return lead * std::pow(sphi / s, alpha / a1) *
         (-std::sin(alpha * kPi - a1 * phi)) / sphi;
}

}  // namespace

StableLaw::StableLaw(double alpha, double scale_c, double shift)
    : alpha_(alpha), scale_c_(scale_c), shift_(shift) {
  require(alpha > 1.0 && alpha <= 2.0, "stable law: alpha must lie in (1, 2]");
  require(scale_c > 0.0, "stable law: C must be positive");
  sigma_ = std::pow(scale_c * std::abs(std::cos(kPi * alpha / 2.0)), 1.0 / alpha);
  if (alpha == 2.0) sigma_ = std::sqrt(scale_c);
  zeta_ = alpha == 2.0 ? 0.0 : std::tan(kPi * alpha / 2.0);
  // Past this distance the four-term tail series is accurate to ~1e-12.
  asymptotic_cutoff_ = std::pow(4000.0 * scale_c, 1.0 / alpha) + 50.0 * sigma_;
}

double StableLaw::standard_density(double z) const {
  const double a = alpha_;
  const double a1 = a - 1.0;
  if (z == zeta_) {
    const double theta0 = kPi / a - kPi / 2.0;
    return std::tgamma(1.0 + 1.0 / a) * std::cos(theta0) /
           (kPi * std::pow(1.0 + zeta_ * zeta_, 1.0 / (2.0 * a)));
  }
  const bool right = z > zeta_;
  const double d = std::abs(z - zeta_);
  const double c = std::pow(d, a / a1);
  const double upper = right ? kPi / a : kPi - kPi / a;
  auto integrand = [&](double phi) {
    const double v = v_function(a, phi, right);
    if (!std::isfinite(v)) return 0.0;
    const double e = c * v;
    return e > 745.0 ? 0.0 : v * std::exp(-e);
  };
  const auto est = quad::integrate(integrand, 0.0, upper, {1e-12, 1e-300}, 16, 4000);
  return a * std::pow(d, 1.0 / a1) / (kPi * a1) * est.value;
}

double StableLaw::standard_survival(double z) const {
  const double a = alpha_;
  const double a1 = a - 1.0;
  if (z == zeta_) return 1.0 / a;
  const bool right = z > zeta_;
  const double c = std::pow(std::abs(z - zeta_), a / a1);
  const double upper = right ? kPi / a : kPi - kPi / a;
  auto integrand = [&](double phi) {
    const double v = v_function(a, phi, right);
    if (!std::isfinite(v)) return 0.0;
    const double e = c * v;
    return e > 745.0 ? 0.0 : std::exp(-e);
  };
  const double tail = quad::integrate(integrand, 0.0, upper, {1e-12, 1e-300}, 16, 4000).value / kPi;
  return right ? tail : 1.0 - tail;
}

double StableLaw::left_tail_density(double r) const {
  double sum = 0.0;
  double ck = 1.0;
  for (int k = 1; k <= 4; ++k) {
    ck *= scale_c_ / k;
    const double ka = k * alpha_;
    sum += ck * std::tgamma(ka + 1.0) * (-std::sin(kPi * ka)) * std::pow(r, -ka - 1.0);
  }
  return sum / kPi;
}

double StableLaw::left_tail_cdf(double r) const {
  double sum = 0.0;
  double ck = 1.0;
  for (int k = 1; k <= 4; ++k) {
    ck *= scale_c_ / k;
    const double ka = k * alpha_;
    sum += ck * std::tgamma(ka + 1.0) * (-std::sin(kPi * ka)) * std::pow(r, -ka) / ka;
  }
  return sum / kPi;
}

double StableLaw::density(double x) const {
  if (alpha_ == 2.0) {
    const double var = 2.0 * scale_c_;
    const double z = x - shift_;
    return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
  }
  if (shift_ - x > asymptotic_cutoff_) return left_tail_density(shift_ - x);
  return standard_density((x - shift_) / sigma_ + zeta_) / sigma_;
}

double StableLaw::survival(double x) const {
  if (alpha_ == 2.0) return normal_survival((x - shift_) / std::sqrt(2.0 * scale_c_));
  if (shift_ - x > asymptotic_cutoff_) return 1.0 - left_tail_cdf(shift_ - x);
  return standard_survival((x - shift_) / sigma_ + zeta_);
}

double StableLaw::draw(Stream& rng) const {
  const double a = alpha_;
  const double beta = -1.0;
  const double t = std::tan(kPi * a / 2.0);
  const double b = std::atan(beta * t) / a;
  const double s = std::pow(1.0 + beta * beta * t * t, 1.0 / (2.0 * a));
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double y = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
  return shift_ + sigma_ * y;
}

}  // namespace fpt
