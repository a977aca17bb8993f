#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "fpt/martingale_fns.hpp"
#include "fpt/montecarlo.hpp"
#include "fpt/passage_problem.hpp"

namespace fpt {

struct FeasibilityReport {
  /// Upper bound H of the innovations and theta = H / (1 - lambda), when bounded.
  std::optional<double> upper_bound;
  std::optional<double> theta;
  /// theta <= a: the path can never exceed a.
  bool certain_infinite = false;
  /// P(eta > a (1 - lambda)) > 0.
  bool crossing_possible = false;
  double crossing_mass = 0.0;
  /// E log(1 + |eta|) < infinity.
  bool log_moment_finite = true;
  bool finite_mean = false;
};

FeasibilityReport feasibility_report(const PassageProblem& p);

/// (H(a) - H(x)): lower bound on E tau_a.
QuadratureResult lower_bound_e_tau(const PassageProblem& p, TransformTolerance tol = {});

/// Upper bound on E tau_a through the innovations capped at h_cap > a (1 - lambda).
QuadratureResult upper_bound_e_tau(const PassageProblem& p, double h_cap,
                                   TransformTolerance tol = {});

/// Quadrature nodes for the identity, fixed before any simulation. The
/// identity reads sum_i coeff_i (E e^{u_i X_tau} - e^{u_i x}).
struct IdentityPlan {
  std::vector<double> u;
  std::vector<double> coeff;
  /// Level a: X_tau > a, so e^{u a} is a lower envelope of the MGF.
  double lower_level = 0.0;
  /// lambda a + H when the innovations are bounded by H: X_tau never exceeds it.
  std::optional<double> upper_level;
};

IdentityPlan plan_identity(const PassageProblem& p, TransformTolerance tol = {});

struct IdentityResult {
  double value = 0.0;
  /// Linear propagation of the per-node MGF standard errors.
  double std_err = 0.0;
  /// Bound on what the clipped nodes could add above their lower envelope.
  double clip_err = 0.0;
  std::size_t nodes = 0;
  std::size_t clipped = 0;
};

/// Relative MGF standard error above which a node is clipped.
inline constexpr double kClipRelErr = 0.1;

IdentityResult identity_e_tau(const PassageProblem& p, const IdentityPlan& plan,
                              const std::vector<MgfNode>& overshoot_mgf);

struct ExponentialCertificate {
  double v_star = 0.0;
  double alpha = 0.0;
  double c_bound = 0.0;
  double n_cap_used = 0.0;
  double n_cap_mass = 0.0;
  double c_x = 0.0;    // C(x, 0) under the floored cumulant
  double c_top = 0.0;  // C(lambda a + N, 0)
  double delta = 0.0;
};

struct VChoice {
  double v = 0.0;
  double c_bound = 0.0;
};

/// The 64-point geometric grid from -delta (1 - 1e-3) to -1e-4.
std::vector<double> v_grid(double delta);

/// Scans the grid from the largest |v| and returns the first v with
/// 1 + 2 v |c_top| > 0 that `verify` accepts.
std::optional<VChoice> sweep_v(double delta, double c_x, double c_top,
                               const std::function<bool(double)>& verify);

/// Default truncation level: the smallest multiple of 1/16 above max(a (1 - lambda), 0).
double default_n_cap(const PassageProblem& p);

ExponentialCertificate exponential_certificate(const PassageProblem& p, double delta = 0.5,
                                               std::optional<double> n_cap = std::nullopt);

struct PassageReport {
  std::optional<IdentityResult> identity;
  std::optional<QuadratureResult> lower_bound;
  std::optional<QuadratureResult> upper_bound;
  std::optional<ExponentialCertificate> certificate;
  std::optional<SimulationSummary> mc_summary;
};

}  // namespace fpt
