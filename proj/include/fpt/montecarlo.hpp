#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpt/martingale_fns.hpp"
#include "fpt/passage_problem.hpp"

namespace fpt {

/// Worker count: FPT_THREADS when set (1 to 256), else hardware concurrency.
std::size_t worker_count();

struct MgfNode {
  double u = 0.0;
  double mean = 0.0;
  double std_err = 0.0;
};

struct SurvivalPoint {
  std::uint64_t n = 0;
  double survival = 0.0;
};

struct PathRecord {
  std::uint64_t tau = 0;
  double x_tau = 0.0;
  bool crossed = false;
};

struct SimulationSummary {
  std::uint64_t n_paths = 0;
  std::uint64_t n_crossed = 0;
  std::uint64_t n_censored = 0;
  std::uint64_t max_steps = 0;
  std::uint64_t seed = 0;
  double e_tau_hat = 0.0;
  double e_tau_se = 0.0;
  std::uint64_t max_tau = 0;
  /// (n, P(tau > n)) for n = 0..max_tau, plus n = max_steps when paths were censored.
  std::vector<SurvivalPoint> survival_curve;
  double overshoot_mean = 0.0;
  double overshoot_se = 0.0;
  double overshoot_min = 0.0;
  std::vector<MgfNode> mgf_nodes;
};

/// Simulates n_paths passages. Path i draws from Stream(seed, i), so the
/// result does not depend on the number of workers.
SimulationSummary simulate_passage(const PassageProblem& p, std::uint64_t n_paths,
                                   std::uint64_t max_steps, std::uint64_t seed,
                                   const std::vector<double>& mgf_u_nodes = {},
                                   std::vector<PathRecord>* paths = nullptr);

/// Coupled passage times: every path feeds the same draws to each spec.
std::vector<std::vector<std::uint64_t>> coupled_passage_times(
    const std::vector<InnovationSpec>& specs, double lambda, double x, double a,
    std::uint64_t n_paths, std::uint64_t max_steps, std::uint64_t seed);

struct StationarySample {
  std::vector<double> theta;
  std::size_t k_horizon = 0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Smallest K with lambda^K scale(eta) / (1 - lambda) < 1e-8, the bound on the
/// neglected tail of the series for bounded innovations.
std::size_t default_k_horizon(const InnovationSpec& spec, double lambda);

/// Draws of sum_{k < K} lambda^k eta_{k+1}; k_horizon = 0 selects the default.
StationarySample simulate_stationary(const InnovationSpec& spec, double lambda,
                                     std::size_t n_draws, std::size_t k_horizon,
                                     std::uint64_t seed);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Kolmogorov survival Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_q(double t);
KsResult two_sample_ks(std::vector<double> a, std::vector<double> b);

/// Two-sample KS of Theta against lambda Theta' + eta, with independent halves.
KsResult stationary_fixed_point_test(const InnovationSpec& spec, double lambda,
                                     std::size_t n_draws, std::uint64_t seed);

struct MartingaleDrift {
  /// E M_n - M_0 and its standard error for n = 1..n_steps.
  std::vector<double> drift;
  std::vector<double> std_err;
  double max_abs_drift = 0.0;
  double max_z = 0.0;
  std::uint64_t n_paths_used = 0;
  std::uint64_t domain_escapes = 0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

/// Simulates M_n = lambda^{vn} f(X_n) (N, W) or H(X_n) - n from X_0 = y0 and
/// estimates its drift. Paths leaving the admissible domain are excluded and
/// counted; a domain_escape error is raised only if no path remains.
MartingaleDrift empirical_martingale_check(const LimitCumulant& lc, TransformKind kind,
                                           double v, double y0, std::uint64_t n_paths,
                                           std::uint64_t n_steps, std::uint64_t seed);

}  // namespace fpt
