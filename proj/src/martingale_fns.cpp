#include "fpt/martingale_fns.hpp"

#include <algorithm>
#include <cmath>

#include "fpt/error.hpp"
#include "fpt/quadrature.hpp"

namespace fpt {

std::string_view to_string(TailDiagnostic t) {
  switch (t) {
    case TailDiagnostic::decayed: return "decayed";
    case TailDiagnostic::truncated_at_umax: return "truncated_at_umax";
    case TailDiagnostic::diverged: return "diverged";
  }
  return "?";
}

std::string_view to_string(TransformKind k) {
  switch (k) {
    case TransformKind::N: return "N";
    case TransformKind::H: return "H";
    case TransformKind::W: return "W";
  }
  return "?";
}

namespace {

constexpr double kScanStep = 0.25;

double log_inv(const LimitCumulant& lc) { return std::log(1.0 / lc.lambda()); }

/// Half-width of the far panel [0, s_end] in s = log u, and whether the
/// integrand decayed before u reached kUMax.
struct ScanResult {
  double s_end;
  bool decayed;
};

ScanResult scan_tail(const LimitCumulant& lc, const Kernel& k, TransformTolerance tol) {
  const double s_max = std::log(kUMax);
  double peak = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 0;; ++j) {
    const double s = std::min(j * kScanStep, s_max);
    const double u = std::exp(s);
    const double h = std::abs(k.decay(u, lc(u)) * std::pow(u, k.v));
    if (!std::isfinite(h)) fail(ErrorKind::divergence, "transform integrand overflowed");
    peak = std::max(peak, h);
    if (j > 0 && h < prev && h <= 1e-2 * std::max(tol.abs, tol.rel * peak)) return {s, true};
    if (s >= s_max) return {s_max, false};
    prev = h;
  }
}

double near_integrand(const LimitCumulant& lc, const Kernel& k, double t) {
  const double u = std::pow(t, 1.0 / k.kappa);
  if (u == 0.0) return 0.0;
  return k.near(u, lc(u)) * std::pow(u, k.v - k.kappa) / k.kappa;
}

double far_integrand(const LimitCumulant& lc, const Kernel& k, double s) {
  const double u = std::exp(s);
  return k.far(u, lc(u)) * std::pow(u, k.v);
}

std::size_t far_panels(double s_end) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(s_end / 0.5)));
}

void require_19(const LimitCumulant& lc, double y, double v, const char* what) {
  const auto c = check_condition_19(lc, y, v);
  if (!c.holds)
    fail(ErrorKind::divergence, std::string(what) + ": integral diverges at y = " +
                                    std::to_string(y) + " (integrand power " +
                                    std::to_string(c.effective_power) + " at u = " +
                                    std::to_string(c.witness_u) + ")");
}

}  // namespace

Condition19 check_condition_19(const LimitCumulant& lc, double y, double v) {
  constexpr int kProbes = 11;
  double power[kProbes];
  double slope_prev = -std::numeric_limits<double>::infinity();
  double u_at[kProbes];
  for (int j = 0; j < kProbes; ++j) {
    const double u = std::pow(10.0, 0.5 * j);
    const double h = 1e-4 * u;
    const double slope = (lc(u + h) - lc(u - h)) / (2.0 * h);
    if (!std::isfinite(slope))
      fail(ErrorKind::indeterminate, "condition check: non-finite phi'(u)");
    if (slope < slope_prev - 1e-6 * (1.0 + std::abs(slope_prev)))
      fail(ErrorKind::indeterminate, "condition check: phi' not monotone on probes");
    slope_prev = slope;
    u_at[j] = u;
    power[j] = u * (y - slope) + v - 1.0;
  }
  constexpr double kMargin = -1.0 - 1e-6;
  Condition19 out;
  out.effective_power = power[kProbes - 1];
  out.holds = power[kProbes - 1] < kMargin;
  out.witness_u = u_at[kProbes - 1];
  if (out.holds) {
    int j = kProbes - 1;
    while (j > 0 && power[j - 1] < kMargin) --j;
    out.witness_u = u_at[j];
  }
  return out;
}

QuadratureResult integrate_kernel(const LimitCumulant& lc, const Kernel& k,
                                  TransformTolerance tol) {
  const quad::Tolerance qt{tol.rel, tol.abs};
  const auto near = quad::integrate(
      [&](double t) { return near_integrand(lc, k, t); }, 0.0, 1.0, qt, 4, 4000);
  const auto scan = scan_tail(lc, k, tol);
  const auto far = quad::integrate(
      [&](double s) { return far_integrand(lc, k, s); }, 0.0, scan.s_end, qt,
      far_panels(scan.s_end), 4000);
  QuadratureResult r;
  r.value = near.value + far.value + (k.far_tail ? k.far_tail(std::exp(scan.s_end)) : 0.0);
  r.abs_err = near.abs_err + far.abs_err;
  r.converged = near.converged && far.converged;
  r.tail = scan.decayed ? TailDiagnostic::decayed : TailDiagnostic::truncated_at_umax;
  if (!std::isfinite(r.value) || !std::isfinite(r.abs_err)) {
    r.tail = TailDiagnostic::diverged;
    fail(ErrorKind::divergence, "transform integral is not finite");
  }
  return r;
}

Kernel transform_kernel(const LimitCumulant& lc, TransformKind kind, double y, double v) {
  Kernel k;
  switch (kind) {
    case TransformKind::N:
      k.near = [y](double u, double phi) { return std::exp(u * y - phi); };
      k.far = k.near;
      k.decay = k.near;
      k.v = v;
      k.kappa = std::min(v, 1.0);
      break;
    case TransformKind::H: {
      const double scale = 1.0 / log_inv(lc);
      // The expm1 form is only needed where uy is small; elsewhere the exponents
      // are combined so that e^{uy} cannot overflow on its own.
      k.near = [y, scale](double u, double phi) {
        const double uy = u * y;
        if (std::abs(uy) < 1.0) return scale * std::exp(-phi) * std::expm1(uy);
        return scale * (std::exp(uy - phi) - std::exp(-phi));
      };
      k.far = k.near;
      k.decay = k.near;
      k.v = 0.0;
      k.kappa = 1.0;
      break;
    }
    case TransformKind::W:
      k.near = [y](double u, double phi) { return std::expm1(u * y - phi); };
      k.far = k.near;
      k.decay = [y](double u, double phi) { return std::exp(u * y - phi); };
      k.far_tail = [v](double u_end) { return std::pow(u_end, v) / v; };
      k.v = v;
      k.kappa = v + 1.0;
      break;
  }
  return k;
}

QuadratureResult eval_N(const LimitCumulant& lc, double y, double v, TransformTolerance tol) {
  require(v > 0.0, "eval_N: v must be positive");
  require_19(lc, y, v, "N_v");
  return integrate_kernel(lc, transform_kernel(lc, TransformKind::N, y, v), tol);
}

QuadratureResult eval_H(const LimitCumulant& lc, double y, TransformTolerance tol) {
  if (y == 0.0) return {0.0, 0.0, true, TailDiagnostic::decayed};
  require_19(lc, std::max(y, 0.0), 0.0, "H");
  return integrate_kernel(lc, transform_kernel(lc, TransformKind::H, y, 0.0), tol);
}

QuadratureResult eval_W(const LimitCumulant& lc, double y, double v, double delta,
                        TransformTolerance tol) {
  require(delta > 0.0 && delta <= 1.0, "eval_W: delta must lie in (0, 1]");
  require(v > -delta && v < 0.0, "eval_W: v must lie in (-delta, 0)");
  require_19(lc, y, v, "W_v");
  return integrate_kernel(lc, transform_kernel(lc, TransformKind::W, y, v), tol);
}

QuadratureResult eval_C(const LimitCumulant& lc, double y, double v, TransformTolerance tol) {
  require(v > -1.0 && v <= 0.0, "eval_C: v must lie in (-1, 0]");
  require_19(lc, y, v, "C");
  Kernel k;
  k.near = [y](double u, double phi) { return std::expm1(u * y - phi); };
  k.far = [y](double u, double phi) { return std::exp(u * y - phi); };
  k.decay = k.far;
  k.v = v;
  k.kappa = v + 1.0;
  return integrate_kernel(lc, k, tol);
}

QuadratureResult eval_transform(const LimitCumulant& lc, TransformKind kind, double y,
                                double v, TransformTolerance tol) {
  switch (kind) {
    case TransformKind::N: return eval_N(lc, y, v, tol);
    case TransformKind::H: return eval_H(lc, y, tol);
    case TransformKind::W: return eval_W(lc, y, v, 1.0, tol);
  }
  return {};
}

HarmonicResidual check_harmonic(const LimitCumulant& lc, TransformKind kind, double y,
                                double v, TransformTolerance tol) {
  const double l = lc.lambda();
  HarmonicResidual h;
  h.f_y = eval_transform(lc, kind, y, v, tol).value;
  // Far in the right tail the transform can overflow where the innovation law
  // carries no representable mass; those points contribute nothing.
  const auto& spec = lc.spec();
  h.expectation = spec.expect([&](double eta) {
    try {
      return eval_transform(lc, kind, l * y + eta, v, tol).value;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::divergence && spec.survival(eta) < 1e-300) return 0.0;
      throw;
    }
  });
  if (kind == TransformKind::H)
    h.residual = std::abs(h.expectation - h.f_y - 1.0);
  else
    h.residual = std::abs(std::pow(l, v) * h.expectation - h.f_y);
  h.relative = h.residual / (std::abs(h.f_y) + 1.0);
  return h;
}

TransformRule build_rule(const LimitCumulant& lc, const std::vector<Kernel>& proxies,
                         TransformTolerance tol) {
  require(!proxies.empty(), "build_rule: no proxies");
  const Kernel& lead = proxies.front();
  std::vector<double> near_scale, far_scale;
  double s_end = 0.0;
  for (const auto& k : proxies) {
    require(k.kappa == lead.kappa && k.v == lead.v, "build_rule: proxies disagree on v");
    const auto full = integrate_kernel(lc, k, tol);
    const double mag = std::max(std::abs(full.value), 1e-300);
    near_scale.push_back(1.0 / mag);
    far_scale.push_back(1.0 / mag);
    s_end = std::max(s_end, scan_tail(lc, k, tol).s_end);
  }
  const double n = static_cast<double>(proxies.size());
  const quad::Tolerance qt{tol.rel / n, tol.abs / n};

  auto near_comb = [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < proxies.size(); ++j)
      s += near_scale[j] * std::abs(near_integrand(lc, proxies[j], t));
    return s;
  };
  auto far_comb = [&](double sv) {
    double s = 0.0;
    for (std::size_t j = 0; j < proxies.size(); ++j)
      s += far_scale[j] * std::abs(far_integrand(lc, proxies[j], sv));
    return s;
  };
  TransformRule rule;
  for (const auto& node : quad::adapted_rule(near_comb, 0.0, 1.0, qt, 4, 4000)) {
    const double u = std::pow(node.x, 1.0 / lead.kappa);
    if (u == 0.0) continue;
    rule.u.push_back(u);
    rule.weight.push_back(node.w * std::pow(u, lead.v - lead.kappa) / lead.kappa);
  }
  for (const auto& node : quad::adapted_rule(far_comb, 0.0, s_end, qt, far_panels(s_end), 4000)) {
    const double u = std::exp(node.x);
    rule.u.push_back(u);
    rule.weight.push_back(node.w * std::pow(u, lead.v));
  }
  rule.phi.reserve(rule.u.size());
  for (double u : rule.u) rule.phi.push_back(lc(u));
  if (lead.far_tail) rule.tail_constant = lead.far_tail(std::exp(s_end));
  return rule;
}

double apply_rule(const TransformRule& rule, const LimitCumulant& lc, TransformKind kind,
                  double y, double v) {
  (void)v;
  double sum = 0.0;
  const std::size_t n = rule.u.size();
  switch (kind) {
    case TransformKind::N:
      for (std::size_t i = 0; i < n; ++i)
        sum += rule.weight[i] * std::exp(rule.u[i] * y - rule.phi[i]);
      break;
    case TransformKind::H:
      for (std::size_t i = 0; i < n; ++i) {
        const double uy = rule.u[i] * y;
        const double bracket = std::abs(uy) < 1.0
                                   ? std::exp(-rule.phi[i]) * std::expm1(uy)
                                   : std::exp(uy - rule.phi[i]) - std::exp(-rule.phi[i]);
        sum += rule.weight[i] * bracket;
      }
      sum /= log_inv(lc);
      break;
    case TransformKind::W:
      for (std::size_t i = 0; i < n; ++i)
        sum += rule.weight[i] * std::expm1(rule.u[i] * y - rule.phi[i]);
      break;
  }
  return sum + rule.tail_constant;
}

}  // namespace fpt
