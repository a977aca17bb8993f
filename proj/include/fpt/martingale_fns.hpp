#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "fpt/cumulant.hpp"

namespace fpt {

enum class TailDiagnostic { decayed, truncated_at_umax, diverged };
std::string_view to_string(TailDiagnostic t);

struct QuadratureResult {
  double value = 0.0;
  double abs_err = 0.0;
  bool converged = false;
  TailDiagnostic tail = TailDiagnostic::decayed;
};

struct TransformTolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

enum class TransformKind { N, H, W };
std::string_view to_string(TransformKind k);

/// Largest u examined by the tail scans and the convergence test.
inline constexpr double kUMax = 1e5;

struct Condition19 {
  bool holds = false;
  /// First probe from which every later probe passes, or the last probe on failure.
  double witness_u = 0.0;
  /// d log(integrand) / d log u at the last probe.
  double effective_power = 0.0;
};

/// Convergence of int_1^inf exp(u y - phi(u)) u^{v-1} du, judged by the
/// logarithmic slope u (y - phi'(u)) + v - 1 of the integrand on probes
/// 10^{j/2}, j = 0..10. Converges iff the slope settles below -1.
Condition19 check_condition_19(const LimitCumulant& lc, double y, double v);

/// N_v(y) = int_0^inf e^{uy - phi(u)} u^{v-1} du, v > 0.
QuadratureResult eval_N(const LimitCumulant& lc, double y, double v,
                        TransformTolerance tol = {});
/// H(y) = (1/log(1/lambda)) int_0^inf (e^{uy} - 1) e^{-phi(u)} u^{-1} du.
QuadratureResult eval_H(const LimitCumulant& lc, double y, TransformTolerance tol = {});
/// W_v(y) = int_0^inf (e^{uy - phi(u)} - 1) u^{v-1} du, v in (-delta, 0).
QuadratureResult eval_W(const LimitCumulant& lc, double y, double v, double delta = 1.0,
                        TransformTolerance tol = {});
/// C(y, v) = int_0^1 (e^{uy - phi} - 1) u^{v-1} du + int_1^inf e^{uy - phi} u^{v-1} du.
QuadratureResult eval_C(const LimitCumulant& lc, double y, double v = 0.0,
                        TransformTolerance tol = {});

/// Dispatch on kind; v is ignored for H.
QuadratureResult eval_transform(const LimitCumulant& lc, TransformKind kind, double y,
                                double v, TransformTolerance tol = {});

struct HarmonicResidual {
  double residual = 0.0;
  /// residual / (|f(y)| + 1)
  double relative = 0.0;
  double f_y = 0.0;
  double expectation = 0.0;
};

/// |lambda^v E f(lambda y + eta) - f(y)| for N and W, |E H(lambda y + eta) - H(y) - 1| for H.
HarmonicResidual check_harmonic(const LimitCumulant& lc, TransformKind kind, double y,
                                double v, TransformTolerance tol = {});

/// Generic integrand for the shared engine: bracket(u, y, phi(u)) * u^{v-1}.
/// `near` is used on (0, 1], `far` on [1, inf); `decay` is the part of the
/// far bracket whose decay ends the tail scan. The far integral is cut at U
/// and `far_tail(U)` is added, which lets W carry its -u^{v-1} tail exactly.
struct Kernel {
  std::function<double(double u, double phi)> near;
  std::function<double(double u, double phi)> far;
  std::function<double(double u, double phi)> decay;
  std::function<double(double u_end)> far_tail;
  double v = 1.0;
  /// Near-zero substitution u = t^{1/kappa}.
  double kappa = 1.0;
};

QuadratureResult integrate_kernel(const LimitCumulant& lc, const Kernel& k,
                                  TransformTolerance tol = {});

/// Fixed quadrature rule in u: integral ~ sum_i weight_i * bracket(u_i) with
/// weights carrying u^{v-1} and the substitution Jacobians. phi_i is cached.
struct TransformRule {
  std::vector<double> u;
  std::vector<double> weight;
  std::vector<double> phi;
  double tail_constant = 0.0;
};

/// Rule adapted jointly to the kernels `proxies` (each normalised by its own
/// magnitude), so every proxy is integrated to `tol`.
TransformRule build_rule(const LimitCumulant& lc, const std::vector<Kernel>& proxies,
                         TransformTolerance tol = {});

/// Kernel for a transform at state y (H includes its 1/log(1/lambda) factor).
Kernel transform_kernel(const LimitCumulant& lc, TransformKind kind, double y, double v);

/// Transform evaluated at y through a fixed rule built for the same kind and v.
double apply_rule(const TransformRule& rule, const LimitCumulant& lc, TransformKind kind,
                  double y, double v);

}  // namespace fpt
