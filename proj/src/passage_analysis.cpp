#include "fpt/passage_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpt/error.hpp"

namespace fpt {
namespace {

double log_inv(double lambda) { return std::log(1.0 / lambda); }

/// (1/log(1/lambda)) e^{ux - phi} (e^{u (hi - x)} - 1) u^{-1}: the integrand of
/// H(hi) - H(x) under the cumulant it is evaluated with.
Kernel difference_kernel(double lambda, double x, double hi) {
  const double scale = 1.0 / log_inv(lambda);
  Kernel k;
  k.near = [=](double u, double phi) {
    const double d = u * (hi - x);
    if (d < 1.0) return scale * std::exp(u * x - phi) * std::expm1(d);
    return scale * (std::exp(u * hi - phi) - std::exp(u * x - phi));
  };
  k.far = k.near;
  k.decay = k.near;
  k.v = 0.0;
  k.kappa = 1.0;
  return k;
}

void require_crossing(const PassageProblem& p) {
  const auto f = feasibility_report(p);
  if (!f.crossing_possible)
    fail(ErrorKind::no_crossing, "P(eta > a (1 - lambda)) = 0: the level is never crossed");
}

void require_convergent(const LimitCumulant& lc, double y, const char* what) {
  const auto c = check_condition_19(lc, y, 0.0);
  if (!c.holds)
    fail(ErrorKind::divergence,
         std::string(what) + ": integral diverges at y = " + std::to_string(y));
}

}  // namespace

FeasibilityReport feasibility_report(const PassageProblem& p) {
  validate(p);
  FeasibilityReport r;
  const double threshold = p.a * (1.0 - p.lambda);
  r.upper_bound = p.spec.upper_bound();
  if (r.upper_bound) {
    r.theta = *r.upper_bound / (1.0 - p.lambda);
    r.certain_infinite = *r.theta <= p.a;
  }
  const auto* s = std::get_if<StableNegative>(&p.spec.family());
  if (s && s->alpha < 1.0) {
    // Support is (-inf, m] with no atom at m.
    r.crossing_possible = threshold < s->shift;
    r.crossing_mass = r.crossing_possible ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  } else {
    r.crossing_mass = p.spec.survival(threshold);
    r.crossing_possible = r.crossing_mass > 0.0;
  }
  r.log_moment_finite = true;
  r.finite_mean = r.log_moment_finite && r.crossing_possible;
  return r;
}

QuadratureResult lower_bound_e_tau(const PassageProblem& p, TransformTolerance tol) {
  validate(p);
  if (p.a == p.x) return {0.0, 0.0, true, TailDiagnostic::decayed};
  const LimitCumulant lc(p.spec, p.lambda);
  require_convergent(lc, p.a, "lower bound");
  auto r = integrate_kernel(lc, difference_kernel(p.lambda, p.x, p.a), tol);
  r.value = std::max(r.value, 0.0);
  return r;
}

QuadratureResult upper_bound_e_tau(const PassageProblem& p, double h_cap,
                                   TransformTolerance tol) {
  validate(p);
  require(std::isfinite(h_cap), "upper bound: H_cap must be finite");
  const auto capped = truncate_cap_above(p.spec, h_cap);
  // A cap above the support changes nothing; the envelope uses the real bound.
  const double h_eff = std::min(h_cap, *capped.upper_bound());
  require(h_eff > p.a * (1.0 - p.lambda),
          "upper bound: H_cap must exceed a (1 - lambda) = " +
              std::to_string(p.a * (1.0 - p.lambda)));
  const LimitCumulant lc(capped.simplified(), p.lambda);
  const double top = p.lambda * p.a + h_eff;
  require_convergent(lc, top, "upper bound");
  return integrate_kernel(lc, difference_kernel(p.lambda, p.x, top), tol);
}

IdentityPlan plan_identity(const PassageProblem& p, TransformTolerance tol) {
  validate(p);
  require_crossing(p);
  const LimitCumulant lc(p.spec, p.lambda);
  IdentityPlan plan;
  plan.lower_level = p.a;
  double top;
  if (const auto h = p.spec.upper_bound()) {
    top = p.lambda * p.a + *h;
    plan.upper_level = top;
  } else {
    top = p.lambda * p.a + p.spec.upper_quantile(1e-6);
  }
  top = std::max(top, p.a);
  require_convergent(lc, top, "identity");
  std::vector<Kernel> proxies{difference_kernel(p.lambda, p.x, top)};
  if (p.a > p.x && top > p.a) proxies.push_back(difference_kernel(p.lambda, p.x, p.a));
  const auto rule = build_rule(lc, proxies, tol);
  const double scale = 1.0 / log_inv(p.lambda);
  plan.u = rule.u;
  plan.coeff.resize(rule.u.size());
  for (std::size_t i = 0; i < rule.u.size(); ++i)
    plan.coeff[i] = scale * rule.weight[i] * std::exp(-rule.phi[i]);
  return plan;
}

IdentityResult identity_e_tau(const PassageProblem& p, const IdentityPlan& plan,
                              const std::vector<MgfNode>& overshoot_mgf) {
  validate(p);
  require_crossing(p);
  if (overshoot_mgf.size() != plan.u.size())
    fail(ErrorKind::coverage, "identity: MGF supplied at " +
                                  std::to_string(overshoot_mgf.size()) + " nodes, plan has " +
                                  std::to_string(plan.u.size()));
  IdentityResult r;
  r.nodes = plan.u.size();
  for (std::size_t i = 0; i < plan.u.size(); ++i) {
    const auto& m = overshoot_mgf[i];
    const double u = plan.u[i];
    if (std::abs(m.u - u) > 1e-12 * std::max(1.0, u) || !std::isfinite(m.mean))
      fail(ErrorKind::coverage, "identity: MGF missing at node u = " + std::to_string(u));
    const double c = plan.coeff[i];
    const double start = std::exp(u * p.x);
    if (m.std_err <= kClipRelErr * std::abs(m.mean)) {
      r.value += c * (m.mean - start);
      r.std_err += std::abs(c) * m.std_err;
      continue;
    }
    ++r.clipped;
    const double lower = std::exp(u * plan.lower_level);
    double upper = m.mean + 3.0 * m.std_err;
    if (plan.upper_level) upper = std::min(upper, std::exp(u * *plan.upper_level));
    upper = std::max(upper, lower);
    r.value += c * (lower - start);
    r.clip_err += std::abs(c) * (upper - lower);
  }
  return r;
}

std::vector<double> v_grid(double delta) {
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  constexpr int kPoints = 64;
  const double hi = delta * (1.0 - 1e-3);
  const double lo = 1e-4;
  std::vector<double> g(kPoints);
  for (int j = 0; j < kPoints; ++j)
    g[j] = -hi * std::pow(lo / hi, static_cast<double>(j) / (kPoints - 1));
  g.back() = -lo;
  return g;
}

std::optional<VChoice> sweep_v(double delta, double c_x, double c_top,
                               const std::function<bool(double)>& verify) {
  for (double v : v_grid(delta)) {
    const double den = 1.0 + 2.0 * v * std::abs(c_top);
    if (!(den > 0.0)) continue;
    if (verify && !verify(v)) continue;
    return VChoice{v, (1.0 - 2.0 * v * std::abs(c_x)) / den};
  }
  return std::nullopt;
}

double default_n_cap(const PassageProblem& p) {
  const double floor = std::max(p.a * (1.0 - p.lambda), 0.0);
  return (std::floor(floor * 16.0) + 1.0) / 16.0;
}

ExponentialCertificate exponential_certificate(const PassageProblem& p, double delta,
                                               std::optional<double> n_cap) {
  validate(p);
  require(delta > 0.0 && delta < 1.0, "certificate: delta must lie in (0, 1)");
  require_crossing(p);
  const double threshold = p.a * (1.0 - p.lambda);
  const double level = n_cap ? *n_cap : default_n_cap(p);
  require(level > threshold && level > 0.0,
          "certificate: N_cap must exceed max(a (1 - lambda), 0)");

  ExponentialCertificate cert;
  cert.delta = delta;
  cert.n_cap_used = level;
  const auto floored = truncate_floor_positive(p.spec, level);
  cert.n_cap_mass = floored.mass_at_least(level);
  const LimitCumulant lc(floored, p.lambda, CumulantMode::series);
  const double top = p.lambda * p.a + level;
  cert.c_x = eval_C(lc, p.x, 0.0).value;
  cert.c_top = eval_C(lc, top, 0.0).value;

  // The bound needs W_v(x) >= 1/v - 2|C(x,0)| and W_v(top) <= 1/v + 2|C(top,0)|,
  // which only hold for v near 0; each candidate is checked directly.
  auto verify = [&](double v) {
    const auto wx = eval_W(lc, p.x, v, delta);
    const auto wt = eval_W(lc, top, v, delta);
    return wt.value + wt.abs_err < 0.0 &&
           wx.value - wx.abs_err >= 1.0 / v - 2.0 * std::abs(cert.c_x) &&
           wt.value + wt.abs_err <= 1.0 / v + 2.0 * std::abs(cert.c_top);
  };
  const auto choice = sweep_v(delta, cert.c_x, cert.c_top, verify);
  if (!choice)
    fail(ErrorKind::certificate_infeasible, "certificate: no admissible v on the grid");
  cert.v_star = choice->v;
  cert.alpha = std::abs(choice->v) * log_inv(p.lambda);
  cert.c_bound = choice->c_bound;
  return cert;
}

}  // namespace fpt
