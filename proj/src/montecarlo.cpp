#include "fpt/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "fpt/error.hpp"
#include "parallel.hpp"

namespace fpt {

void validate(const PassageProblem& p) {
  require(p.lambda > 0.0 && p.lambda < 1.0, "0 < λ < 1");
  require(std::isfinite(p.x) && std::isfinite(p.a), "x and a must be finite");
  require(p.a >= p.x, "a ≥ x");
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FPT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    // An explicit setting wins over the hardware count so that worker-count
    // independence can be exercised on small machines too.
    if (end != env && cap >= 1) n = static_cast<std::size_t>(std::min(cap, 256L));
  }
  return n;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Two-pass mean and standard error in index order.
template <class G>
MeanSe mean_se(std::size_t n, G value) {
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += value(i);
  const double m = s / static_cast<double>(n);
  if (n < 2) return {m, 0.0};
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = value(i) - m;
    q += d * d;
  }
  return {m, std::sqrt(q / static_cast<double>(n - 1) / static_cast<double>(n))};
}

PathRecord run_path(const PassageProblem& p, std::uint64_t max_steps, Stream& rng) {
  double x = p.x;
  for (std::uint64_t n = 1; n <= max_steps; ++n) {
    x = p.lambda * x + p.spec.draw(rng);
    if (x > p.a) return {n, x, true};
  }
  return {max_steps, x, false};
}

}  // namespace

SimulationSummary simulate_passage(const PassageProblem& p, std::uint64_t n_paths,
                                   std::uint64_t max_steps, std::uint64_t seed,
                                   const std::vector<double>& mgf_u_nodes,
                                   std::vector<PathRecord>* paths) {
  validate(p);
  require(n_paths >= 1, "simulate_passage: n_paths must be at least 1");
  require(max_steps >= 1, "simulate_passage: max_steps must be at least 1");
  if (!p.spec.can_sample())
    fail(ErrorKind::unsupported_sampler, "simulate_passage: family cannot be sampled");

  std::vector<PathRecord> rec(n_paths);
  detail::parallel_chunks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rng(seed, i);
      rec[i] = run_path(p, max_steps, rng);
    }
  });

  SimulationSummary s;
  s.n_paths = n_paths;
  s.max_steps = max_steps;
  s.seed = seed;
  std::vector<double> x_tau;
  std::vector<std::uint64_t> hist;
  for (const auto& r : rec) {
    if (!r.crossed) {
      ++s.n_censored;
      continue;
    }
    ++s.n_crossed;
    x_tau.push_back(r.x_tau);
    s.max_tau = std::max(s.max_tau, r.tau);
    if (hist.size() <= r.tau) hist.resize(r.tau + 1, 0);
    ++hist[r.tau];
  }
  std::vector<double> taus;
  taus.reserve(s.n_crossed);
  for (const auto& r : rec)
    if (r.crossed) taus.push_back(static_cast<double>(r.tau));
  const auto t = mean_se(taus.size(), [&](std::size_t i) { return taus[i]; });
  s.e_tau_hat = t.mean;
  s.e_tau_se = t.se;
  const auto o = mean_se(x_tau.size(), [&](std::size_t i) { return x_tau[i] - p.a; });
  s.overshoot_mean = o.mean;
  s.overshoot_se = o.se;
  s.overshoot_min = std::numeric_limits<double>::quiet_NaN();
  if (!x_tau.empty()) {
    s.overshoot_min = x_tau[0] - p.a;
    for (double x : x_tau) s.overshoot_min = std::min(s.overshoot_min, x - p.a);
  }

  const double total = static_cast<double>(n_paths);
  std::uint64_t done = 0;
  for (std::uint64_t n = 0; n <= s.max_tau; ++n) {
    if (n < hist.size()) done += hist[n];
    s.survival_curve.push_back({n, static_cast<double>(n_paths - done) / total});
  }
  if (s.n_censored > 0 && max_steps > s.max_tau)
    s.survival_curve.push_back({max_steps, static_cast<double>(s.n_censored) / total});

  s.mgf_nodes.resize(mgf_u_nodes.size());
  detail::parallel_chunks(
      mgf_u_nodes.size(),
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
          const double u = mgf_u_nodes[j];
          const auto m = mean_se(x_tau.size(), [&](std::size_t i) { return std::exp(u * x_tau[i]); });
          s.mgf_nodes[j] = {u, m.mean, m.se};
        }
      },
      1);
  if (paths) *paths = std::move(rec);
  return s;
}

std::vector<std::vector<std::uint64_t>> coupled_passage_times(
    const std::vector<InnovationSpec>& specs, double lambda, double x, double a,
    std::uint64_t n_paths, std::uint64_t max_steps, std::uint64_t seed) {
  std::vector<std::vector<std::uint64_t>> out(specs.size(),
                                              std::vector<std::uint64_t>(n_paths));
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const PassageProblem p{lambda, x, a, specs[k]};
    validate(p);
    detail::parallel_chunks(n_paths, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Stream rng(seed, i);
        const auto r = run_path(p, max_steps, rng);
        out[k][i] = r.crossed ? r.tau : std::numeric_limits<std::uint64_t>::max();
      }
    });
  }
  return out;
}

std::size_t default_k_horizon(const InnovationSpec& spec, double lambda) {
  require(lambda > 0.0 && lambda < 1.0, "0 < λ < 1");
  const double scale = spec.scale();
  if (!(scale > 0.0)) return 1;
  const double k = std::log(1e-8 * (1.0 - lambda) / scale) / std::log(lambda);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(k)));
}

StationarySample simulate_stationary(const InnovationSpec& spec, double lambda,
                                     std::size_t n_draws, std::size_t k_horizon,
                                     std::uint64_t seed) {
  require(lambda > 0.0 && lambda < 1.0, "0 < λ < 1");
  require(n_draws >= 1, "simulate_stationary: n_draws must be at least 1");
  if (!spec.can_sample())
    fail(ErrorKind::unsupported_sampler, "simulate_stationary: family cannot be sampled");
  StationarySample out;
  out.k_horizon = k_horizon == 0 ? default_k_horizon(spec, lambda) : k_horizon;
  out.theta.resize(n_draws);
  detail::parallel_chunks(n_draws, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rng(seed, i, 1);
      double sum = 0.0, w = 1.0;
      for (std::size_t k = 0; k < out.k_horizon; ++k) {
        sum += w * spec.draw(rng);
        w *= lambda;
      }
      out.theta[i] = sum;
    }
  });
  const auto m = mean_se(n_draws, [&](std::size_t i) { return out.theta[i]; });
  out.mean = m.mean;
  double q = 0.0;
  for (double t : out.theta) q += (t - m.mean) * (t - m.mean);
  out.variance = n_draws > 1 ? q / static_cast<double>(n_draws - 1) : 0.0;
  return out;
}

double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) {
    // Jacobi theta form; the alternating series converges slowly here.
    const double c = std::sqrt(2.0 * std::numbers::pi) / t;
    double s = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double k = 2.0 * j - 1.0;
      s += std::exp(-k * k * std::numbers::pi * std::numbers::pi / (8.0 * t * t));
    }
    return 1.0 - c * s;
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    s += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n1 = a.size();
  r.n2 = b.size();
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

KsResult stationary_fixed_point_test(const InnovationSpec& spec, double lambda,
                                     std::size_t n_draws, std::uint64_t seed) {
  require(n_draws >= 2, "stationary_fixed_point_test: need at least two draws");
  auto sample = simulate_stationary(spec, lambda, n_draws, 0, seed);
  const std::size_t half = n_draws / 2;
  std::vector<double> first(sample.theta.begin(), sample.theta.begin() + half);
  std::vector<double> mapped(sample.theta.begin() + half, sample.theta.end());
  detail::parallel_chunks(mapped.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rng(seed, i, 2);
      mapped[i] = lambda * mapped[i] + spec.draw(rng);
    }
  });
  return two_sample_ks(std::move(first), std::move(mapped));
}

MartingaleDrift empirical_martingale_check(const LimitCumulant& lc, TransformKind kind,
                                           double v, double y0, std::uint64_t n_paths,
                                           std::uint64_t n_steps, std::uint64_t seed) {
  require(n_paths >= 2 && n_steps >= 1, "empirical_martingale_check: need paths and steps");
  const auto& spec = lc.spec();
  const double lambda = lc.lambda();
  if (kind == TransformKind::N) require(v > 0.0, "kind N needs v > 0");
  if (kind == TransformKind::W) require(v > -1.0 && v < 0.0, "kind W needs v in (-1, 0)");
  const double order = kind == TransformKind::H ? 0.0 : v;

  std::vector<double> states(n_paths * n_steps);
  detail::parallel_chunks(n_paths, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rng(seed, i, 3);
      double x = y0;
      for (std::size_t n = 0; n < n_steps; ++n) {
        x = lambda * x + spec.draw(rng);
        states[i * n_steps + n] = x;
      }
    }
  });

  double lo = y0, hi = y0;
  for (double s : states) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  auto admissible = [&](double y) {
    const double probe = kind == TransformKind::H ? std::max(y, 0.0) : y;
    return check_condition_19(lc, probe, order).holds;
  };
  if (!admissible(y0))
    fail(ErrorKind::domain_escape, "empirical_martingale_check: y0 outside the domain");
  double edge = hi;
  if (!admissible(hi)) {
    double a = y0, b = hi;
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      (admissible(m) ? a : b) = m;
    }
    edge = a;
  }

  MartingaleDrift out;
  out.y_lo = lo;
  out.y_hi = edge;
  std::vector<Kernel> proxies;
  for (int j = 0; j <= 4; ++j)
    proxies.push_back(transform_kernel(lc, kind, lo + (edge - lo) * j / 4.0, order));
  const auto rule = build_rule(lc, proxies);

  const double m0 = apply_rule(rule, lc, kind, y0, order);
  std::vector<double> m(n_paths * n_steps);
  std::vector<char> escaped(n_paths, 0);
  detail::parallel_chunks(n_paths, [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) {
      for (std::size_t n = 0; n < n_steps; ++n) {
        const double y = states[i * n_steps + n];
        if (y > edge) {
          escaped[i] = 1;
          break;
        }
        const double f = apply_rule(rule, lc, kind, y, order);
        const double step = static_cast<double>(n + 1);
        m[i * n_steps + n] =
            kind == TransformKind::H ? f - step - m0 : std::pow(lambda, order * step) * f - m0;
      }
    }
  });
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n_paths; ++i) {
    if (escaped[i])
      ++out.domain_escapes;
    else
      kept.push_back(i);
  }
  if (kept.empty())
    fail(ErrorKind::domain_escape, "empirical_martingale_check: every path left the domain");
  out.n_paths_used = kept.size();
  for (std::size_t n = 0; n < n_steps; ++n) {
    const auto d = mean_se(kept.size(), [&](std::size_t k) { return m[kept[k] * n_steps + n]; });
    out.drift.push_back(d.mean);
    out.std_err.push_back(d.se);
    out.max_abs_drift = std::max(out.max_abs_drift, std::abs(d.mean));
    if (d.se > 0.0) out.max_z = std::max(out.max_z, std::abs(d.mean) / d.se);
  }
  return out;
}

}  // namespace fpt
