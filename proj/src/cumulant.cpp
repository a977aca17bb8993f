#include "fpt/cumulant.hpp"

#include <algorithm>
#include <cmath>

#include "fpt/error.hpp"

namespace fpt {

bool has_closed_form(const InnovationSpec& spec, CumulantMode mode) {
  switch (mode) {
    case CumulantMode::series:
      return true;
    case CumulantMode::closed_form_stable:
      return std::holds_alternative<Gaussian>(spec.family()) ||
             std::holds_alternative<StableNegative>(spec.family());
    case CumulantMode::closed_form_deterministic:
      return std::holds_alternative<Deterministic>(spec.family());
  }
  return false;
}

namespace {

CumulantMode default_mode(const InnovationSpec& spec) {
  if (has_closed_form(spec, CumulantMode::closed_form_stable))
    return CumulantMode::closed_form_stable;
  if (has_closed_form(spec, CumulantMode::closed_form_deterministic))
    return CumulantMode::closed_form_deterministic;
  return CumulantMode::series;
}

}  // namespace

LimitCumulant::LimitCumulant(InnovationSpec spec, double lambda)
    : LimitCumulant(spec, lambda, default_mode(spec)) {}

LimitCumulant::LimitCumulant(InnovationSpec spec, double lambda, CumulantMode mode,
                             SeriesControls controls)
    : spec_(std::move(spec)), lambda_(lambda), mode_(mode), controls_(controls) {
  require(lambda > 0.0 && lambda < 1.0, "0 < λ < 1");
  require(has_closed_form(spec_, mode), "no closed form for family " + spec_.name());
  require(controls.abs_term_floor > 0.0 && controls.k_max >= 1, "invalid series controls");
}

PhiValue LimitCumulant::phi(double u) const {
  require(u >= 0.0, "phi: u must be nonnegative");
  if (u == 0.0) return {};
  const double l = lambda_;
  switch (mode_) {
    case CumulantMode::closed_form_stable: {
      if (const auto* g = std::get_if<Gaussian>(&spec_.family()))
        return {g->mean * u / (1.0 - l) + 0.5 * g->variance * u * u / (1.0 - l * l), 0.0, 0};
      const auto& s = std::get<StableNegative>(spec_.family());
      const double sgn = s.alpha > 1.0 ? 1.0 : -1.0;
      return {s.shift * u / (1.0 - l) +
                  sgn * s.scale * std::pow(u, s.alpha) / (1.0 - std::pow(l, s.alpha)),
              0.0, 0};
    }
    case CumulantMode::closed_form_deterministic:
      return {std::get<Deterministic>(spec_.family()).value * u / (1.0 - l), 0.0, 0};
    case CumulantMode::series:
      break;
  }
  return series(u);
}

PhiValue LimitCumulant::series(double u) const {
  // Early terms can be non-monotone where psi dips below zero, so the tail
  // test only engages once lambda^k u has fallen below one.
  const double log_inv = std::log(1.0 / lambda_);
  const auto k_min =
      static_cast<std::size_t>(std::ceil(std::log(std::max(u, 1.0)) / log_inv)) + 8;
  double sum = 0.0, comp = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < controls_.k_max; ++k) {
    const double term = spec_.psi(u * std::pow(lambda_, static_cast<double>(k)));
    if (!std::isfinite(term))
      fail(ErrorKind::series_divergence, "phi series: non-finite term");
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    if (k >= k_min) {
      double r = prev != 0.0 ? std::abs(term / prev) : lambda_;
      r = std::clamp(r, lambda_, 1.0 - 1e-9);
      const double tail = std::abs(term) * r / (1.0 - r);
      if (tail < controls_.abs_term_floor) return {sum + comp, tail, k + 1};
    }
    prev = term;
  }
  fail(ErrorKind::series_divergence,
       "phi series: no tail control after k_max terms at u = " + std::to_string(u));
}

double check_functional_equation(const LimitCumulant& lc, const std::vector<double>& u_grid) {
  double worst = 0.0;
  for (double u : u_grid) {
    const double r = lc(u) - lc(lc.lambda() * u) - lc.psi(u);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

SlopeReport slope_probe(const LimitCumulant& lc, const std::vector<double>& u_probes) {
  require(!u_probes.empty() && std::is_sorted(u_probes.begin(), u_probes.end()) &&
              std::adjacent_find(u_probes.begin(), u_probes.end()) == u_probes.end(),
          "slope_probe: probes must be strictly increasing");
  require(u_probes.front() > 0.0, "slope_probe: probes must be positive");
  require(u_probes.back() >= 1e3, "slope_probe: largest probe must be at least 1e3");

  SlopeReport rep;
  rep.probes = u_probes;
  for (double u : u_probes) rep.ratios.push_back(lc(u) / u);
  const double u_max = u_probes.back();
  rep.slope_estimate = rep.ratios.back();

  const double decade = lc(u_max / 10.0) / (u_max / 10.0);
  bool increasing = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i)
    increasing = increasing && rep.ratios[i] > rep.ratios[i - 1];
  rep.superlinear = increasing && decade > 0.0 && rep.slope_estimate >= 2.0 * decade;

  if (const auto h = lc.spec().upper_bound()) {
    rep.theoretical_slope = *h / (1.0 - lc.lambda());
    for (double r : rep.ratios) rep.deficits.push_back(*rep.theoretical_slope - r);
    for (std::size_t i = 0; i < rep.deficits.size(); ++i) {
      // Rounding of phi(u) / u is the only slack granted.
      const double eps = 1e-12 * (1.0 + std::abs(rep.ratios[i]));
      if (rep.deficits[i] < -eps) rep.deficit_nonnegative = false;
      if (i > 0 && rep.deficits[i] > rep.deficits[i - 1] + eps) rep.deficit_nonincreasing = false;
    }
  }
  return rep;
}

std::optional<StationaryMoments> stationary_reference(const InnovationSpec& spec,
                                                      double lambda) {
  require(lambda > 0.0 && lambda < 1.0, "0 < λ < 1");
  const auto m = spec.mean();
  if (!m) return std::nullopt;
  StationaryMoments out;
  out.mean = *m / (1.0 - lambda);
  if (const auto v = spec.variance()) out.variance = *v / (1.0 - lambda * lambda);
  return out;
}

}  // namespace fpt
