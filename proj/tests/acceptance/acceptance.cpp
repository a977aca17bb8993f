// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpt/cli_io.hpp"
#include "fpt/cumulant.hpp"
#include "fpt/error.hpp"
#include "fpt/martingale_fns.hpp"
#include "fpt/montecarlo.hpp"
#include "fpt/passage_analysis.hpp"

namespace {

using namespace fpt;
using nlohmann::json;

constexpr std::uint64_t kSeed = 20240611;
constexpr std::uint64_t kCertificateSeed = 777;
constexpr double kZ99 = 2.3263478740408408;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> u_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 500; ++i) g.push_back(0.1 * i);
  return g;
}

// Criteria 5 and 7 are rerun under another worker count for criterion 11.
struct FlagshipRun {
  json numbers;
  IdentityResult identity;
  SimulationSummary mc;
};

FlagshipRun flagship() {
  const PassageProblem p{0.5, 0.0, 1.0, InnovationSpec::gaussian(0.0, 1.0)};
  const auto plan = plan_identity(p);
  FlagshipRun r;
  r.mc = simulate_passage(p, 1000000, 1000000, kSeed, plan.u);
  r.identity = identity_e_tau(p, plan, r.mc.mgf_nodes);
  r.numbers = {{"identity", to_json(r.identity)}, {"mc", to_json(r.mc)}};
  return r;
}

struct CertificateRun {
  json numbers;
  ExponentialCertificate cert;
  SimulationSummary mc;
};

CertificateRun certificate_run() {
  const PassageProblem p{0.5, 0.0, 1.0, InnovationSpec::gaussian(0.0, 1.0)};
  CertificateRun r;
  r.cert = exponential_certificate(p, 0.5);
  r.mc = simulate_passage(p, 1000000, 1000000, kCertificateSeed);
  r.numbers = {{"certificate", to_json(r.cert)}, {"mc", to_json(r.mc)}};
  return r;
}

}  // namespace

int main() {
  setenv("FPT_THREADS", "1", 1);

  report(1, "series phi matches the Gaussian closed form", [] {
    double worst = 0.0;
    for (double lambda : {0.3, 0.5, 0.9}) {
      const auto spec = InnovationSpec::gaussian(0.0, 1.0);
      const LimitCumulant closed(spec, lambda, CumulantMode::closed_form_stable);
      const LimitCumulant series(spec, lambda, CumulantMode::series);
      for (double u : u_grid()) worst = std::max(worst, std::abs(closed(u) - series(u)));
    }
    return Outcome{worst < 1e-10, fmt("max |delta| = %.3e (< 1e-10)", worst)};
  });

  report(2, "functional equation for every registered family", [] {
    const auto g = InnovationSpec::gaussian(0.0, 1.0);
    const std::vector<InnovationSpec> specs{
        g,
        InnovationSpec::deterministic(1.0),
        InnovationSpec::two_point(1.0, -1.0, 0.5),
        InnovationSpec::stable(1.5, 1.0, 0.0),
        InnovationSpec::stable(0.5, 1.0, 0.0),
        truncate_cap_above(g, 1.0),
        truncate_floor_positive(g, 1.0)};
    double worst = 0.0;
    std::string where;
    for (const auto& s : specs) {
      for (double lambda : {0.3, 0.5, 0.9}) {
        std::vector<LimitCumulant> lcs{LimitCumulant(s, lambda)};
        if (lcs.front().mode() != CumulantMode::series)
          lcs.emplace_back(s, lambda, CumulantMode::series);
        for (const auto& lc : lcs) {
          const double r = check_functional_equation(lc, u_grid());
          if (r >= worst) {
            worst = r;
            where = s.describe() + fmt(", lambda=%.1f", lambda);
          }
        }
      }
    }
    return Outcome{worst < 1e-8, fmt("max residual = %.3e (< 1e-8)", worst) + " at " + where};
  });

  report(3, "harmonic equations for N_v, H, W_v", [] {
    const double lambda = 0.5;
    const std::vector<InnovationSpec> specs{InnovationSpec::gaussian(0.0, 1.0),
                                            InnovationSpec::two_point(1.0, -1.0, 0.5),
                                            InnovationSpec::deterministic(1.0)};
    struct Order {
      TransformKind kind;
      double v;
    };
    const std::vector<Order> orders{{TransformKind::N, 0.5}, {TransformKind::N, 1.0},
                                    {TransformKind::N, 2.0}, {TransformKind::H, 0.0},
                                    {TransformKind::W, -0.1}, {TransformKind::W, -0.4}};
    double worst = 0.0;
    int checks = 0;
    for (const auto& s : specs) {
      const LimitCumulant lc(s, lambda);
      const auto h = s.upper_bound();
      const double a_dom = h ? *h / (1.0 - lambda) : 2.0;
      for (const auto& o : orders)
        for (double y : {-2.0, 0.0, 0.5 * a_dom}) {
          worst = std::max(worst, check_harmonic(lc, o.kind, y, o.v).residual);
          ++checks;
        }
    }
    return Outcome{worst < 1e-6, fmt("max residual = %.3e (< 1e-6)", worst) +
                                     " over " + std::to_string(checks) + " checks"};
  });

  report(4, "deterministic identity equals the exact passage time", [] {
    const PassageProblem p{0.5, 0.0, 1.5, InnovationSpec::deterministic(1.0)};
    const auto plan = plan_identity(p);
    const auto mc = simulate_passage(p, 1000, 1000, kSeed, plan.u);
    const auto id = identity_e_tau(p, plan, mc.mgf_nodes);
    const bool always_three = mc.n_crossed == mc.n_paths && mc.e_tau_hat == 3.0 &&
                              mc.max_tau == 3 && mc.survival_curve.size() == 4 &&
                              mc.survival_curve[2].survival == 1.0 &&
                              mc.survival_curve[3].survival == 0.0;
    return Outcome{std::abs(id.value - 3.0) <= 1e-8 && always_three,
                   fmt("identity = %.12f", id.value) +
                       (always_three ? ", tau = 3 on every path" : ", tau varies")};
  });

  FlagshipRun run5;
  report(5, "identity vs Monte Carlo mean, Gaussian, 1e6 paths", [&] {
    run5 = flagship();
    const auto& id = run5.identity;
    const auto& mc = run5.mc;
    const double id_err = id.std_err + id.clip_err;
    const double combined = std::sqrt(id_err * id_err + mc.e_tau_se * mc.e_tau_se);
    const double diff = std::abs(id.value - mc.e_tau_hat);
    const bool ok = mc.n_censored == 0 && diff <= 3.0 * combined;
    return Outcome{ok, fmt("identity = %.4f", id.value) + fmt(" (se %.4f", id.std_err) +
                           fmt(", clip %.4f)", id.clip_err) + fmt(", mc = %.4f", mc.e_tau_hat) +
                           fmt(" (se %.4f)", mc.e_tau_se) + fmt(", |diff| = %.2f", diff / combined) +
                           " combined se, censored = " + std::to_string(mc.n_censored)};
  });

  report(6, "bound sandwich around the simulated mean", [&] {
    std::string detail;
    bool ok = true;
    const std::vector<PassageProblem> problems{
        {0.5, 0.0, 1.0, InnovationSpec::gaussian(0.0, 1.0)},
        {0.5, 0.0, 1.0, InnovationSpec::two_point(1.0, -1.0, 0.5)}};
    for (std::size_t i = 0; i < problems.size(); ++i) {
      const auto& p = problems[i];
      const auto mc = i == 0 && run5.mc.n_paths ? run5.mc
                                                : simulate_passage(p, 1000000, 1000000, kSeed + i);
      const double lo = lower_bound_e_tau(p).value;
      const double hi = upper_bound_e_tau(p, 4.0).value;
      const double slack = kZ99 * mc.e_tau_se;
      const bool this_ok = mc.n_censored == 0 && lo <= mc.e_tau_hat + slack &&
                           mc.e_tau_hat - slack <= hi;
      ok = ok && this_ok;
      if (!detail.empty()) detail += "; ";
      detail += p.spec.name() + fmt(": %.4f", lo) + fmt(" <= %.4f", mc.e_tau_hat) +
                fmt(" (se %.4f)", mc.e_tau_se) + fmt(" <= %.4f", hi);
    }
    return Outcome{ok, detail};
  });

  CertificateRun run7;
  report(7, "exponential certificate dominates the empirical survival", [&] {
    run7 = certificate_run();
    const auto& c = run7.cert;
    double worst = -1.0;
    std::uint64_t worst_n = 0;
    const double n = static_cast<double>(run7.mc.n_paths);
    for (const auto& pt : run7.mc.survival_curve) {
      const double b = std::min(1.0, c.c_bound * std::exp(-c.alpha * static_cast<double>(pt.n)));
      const double excess = pt.survival - (b + kZ99 * std::sqrt(b * (1.0 - b) / n));
      if (excess > worst) {
        worst = excess;
        worst_n = pt.n;
      }
    }
    const bool ok = c.alpha > 0.0 && worst <= 0.0;
    return Outcome{ok, fmt("alpha = %.4e", c.alpha) + fmt(", c_bound = %.4f", c.c_bound) +
                           fmt(", N = %.4f", c.n_cap_used) +
                           fmt(", max excess = %.3e", worst) + " at n = " +
                           std::to_string(worst_n) + " over " +
                           std::to_string(run7.mc.survival_curve.size()) + " points"};
  });

  report(8, "floored Gaussian slope tends to N / (1 - lambda)", [] {
    const LimitCumulant lc(truncate_floor_positive(InnovationSpec::gaussian(0.0, 1.0), 1.0), 0.5);
    const auto r = slope_probe(lc, {1e2, 1e3, 1e4});
    const double gap = std::abs(r.ratios.back() - 2.0);
    const bool ok = gap < 0.02 && r.deficit_nonnegative && r.deficit_nonincreasing;
    return Outcome{ok, fmt("|phi(1e4)/1e4 - 2| = %.3e", gap) + fmt(", deficits %.3e", r.deficits[0]) +
                           fmt(" %.3e", r.deficits[1]) + fmt(" %.3e", r.deficits[2])};
  });

  report(9, "stationary law moments and fixed point", [] {
    const auto spec = InnovationSpec::gaussian(0.0, 1.0);
    const auto s = simulate_stationary(spec, 0.5, 1000000, default_k_horizon(spec, 0.5), kSeed);
    const double mean_tol = 3.0 * std::sqrt(4.0 / 3.0) / 1e3;
    const double var_rel = std::abs(s.variance / (4.0 / 3.0) - 1.0);
    const auto ks = stationary_fixed_point_test(spec, 0.5, 1000000, kSeed);
    const bool ok = std::abs(s.mean) < mean_tol && var_rel < 0.01 && ks.p_value > 0.01;
    return Outcome{ok, fmt("mean = %.5f", s.mean) + fmt(" (< %.5f)", mean_tol) +
                           fmt(", variance = %.5f", s.variance) + fmt(" (rel %.2e)", var_rel) +
                           fmt(", KS p = %.3f", ks.p_value)};
  });

  report(10, "certain-infinite detection", [] {
    const PassageProblem p{0.5, 0.0, 3.0, InnovationSpec::deterministic(1.0)};
    const auto f = feasibility_report(p);
    const auto mc = simulate_passage(p, 1000, 10000, kSeed);
    const bool ok = f.certain_infinite && mc.n_censored == mc.n_paths && mc.n_crossed == 0;
    return Outcome{ok, std::string("certain_infinite = ") + (f.certain_infinite ? "true" : "false") +
                           ", censored " + std::to_string(mc.n_censored) + "/" +
                           std::to_string(mc.n_paths)};
  });

  report(11, "criteria 5 and 7 reproduce byte for byte with 8 workers", [&] {
    setenv("FPT_THREADS", "8", 1);
    const std::size_t workers = worker_count();
    const auto again5 = flagship();
    const auto again7 = certificate_run();
    setenv("FPT_THREADS", "1", 1);
    const bool same5 = again5.numbers.dump() == run5.numbers.dump();
    const bool same7 = again7.numbers.dump() == run7.numbers.dump();
    return Outcome{workers == 8 && same5 && same7,
                   "workers " + std::to_string(workers) + ", run 5 " +
                       (same5 ? "identical" : "DIFFERS") + ", run 7 " +
                       (same7 ? "identical" : "DIFFERS")};
  });

  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
