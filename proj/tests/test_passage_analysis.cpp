#include <gtest/gtest.h>

#include <cmath>

#include "fpt/error.hpp"
#include "fpt/montecarlo.hpp"
#include "fpt/passage_analysis.hpp"

namespace fpt {
namespace {

PassageProblem det_problem(double a, double c = 1.0, double lambda = 0.5, double x = 0.0) {
  return {lambda, x, a, InnovationSpec::deterministic(c)};
}

PassageProblem gaussian_problem() { return {0.5, 0.0, 1.0, InnovationSpec::gaussian(0.0, 1.0)}; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::config;
}

TEST(LowerBound, DeterministicFrullani) {
  EXPECT_NEAR(lower_bound_e_tau(det_problem(1.0)).value, 1.0, 1e-9);
}

TEST(LowerBound, ZeroWhenStartingAtLevel) {
  auto p = gaussian_problem();
  p.x = 1.0;
  EXPECT_EQ(lower_bound_e_tau(p).value, 0.0);
}

TEST(LowerBound, BelowSimulatedMean) {
  const auto p = gaussian_problem();
  const auto lb = lower_bound_e_tau(p);
  const auto mc = simulate_passage(p, 100000, 1000000, 11);
  EXPECT_GT(lb.value, 0.0);
  EXPECT_LT(lb.value, mc.e_tau_hat - 3.0 * mc.e_tau_se);
}

TEST(LowerBound, NondecreasingInLevel) {
  auto p = gaussian_problem();
  double prev = 0.0;
  for (double a = 0.0; a <= 3.0; a += 0.25) {
    p.a = a;
    const double v = lower_bound_e_tau(p).value;
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(UpperBound, DeterministicMatchesIdentity) {
  const auto p = det_problem(1.5);
  for (double cap : {1.0, 1.5, 4.0}) EXPECT_NEAR(upper_bound_e_tau(p, cap).value, 3.0, 1e-8);
}

TEST(UpperBound, GaussianAboveSimulatedMean) {
  const auto p = gaussian_problem();
  const auto ub = upper_bound_e_tau(p, 4.0);
  const auto mc = simulate_passage(p, 100000, 1000000, 12);
  EXPECT_GT(ub.value, mc.e_tau_hat + 2.326 * mc.e_tau_se);
}

TEST(UpperBound, TwoPointSandwich) {
  const PassageProblem p{0.5, 0.0, 1.0, InnovationSpec::two_point(1.0, -1.0, 0.5)};
  EXPECT_GE(upper_bound_e_tau(p, 1.0).value, lower_bound_e_tau(p).value);
}

TEST(UpperBound, InfeasibleCap) {
  EXPECT_EQ(kind_of([] { upper_bound_e_tau(gaussian_problem(), 0.5); }), ErrorKind::precondition);
}

TEST(Identity, DeterministicIsExact) {
  const auto p = det_problem(1.5);
  const auto plan = plan_identity(p);
  const auto mc = simulate_passage(p, 8, 100, 1, plan.u);
  const auto r = identity_e_tau(p, plan, mc.mgf_nodes);
  EXPECT_NEAR(r.value, 3.0, 1e-8);
  EXPECT_LT(r.std_err, 1e-12);
  EXPECT_EQ(r.clipped, 0u);
}

TEST(Identity, DegenerateStartAtLevel) {
  auto p = gaussian_problem();
  p.x = p.a;
  const auto plan = plan_identity(p);
  std::vector<MgfNode> nodes;
  for (double u : plan.u) nodes.push_back({u, std::exp(u * p.a), 0.0});
  EXPECT_NEAR(identity_e_tau(p, plan, nodes).value, 0.0, 1e-12);
}

TEST(Identity, CoverageMismatch) {
  const auto p = gaussian_problem();
  const auto plan = plan_identity(p);
  std::vector<MgfNode> nodes;
  for (std::size_t i = 0; i + 1 < plan.u.size(); ++i) nodes.push_back({plan.u[i], 1.0, 0.0});
  EXPECT_EQ(kind_of([&] { identity_e_tau(p, plan, nodes); }), ErrorKind::coverage);
  nodes.push_back({plan.u.back() * 1.5, 1.0, 0.0});
  EXPECT_EQ(kind_of([&] { identity_e_tau(p, plan, nodes); }), ErrorKind::coverage);
}

TEST(Identity, DeterministicDegeneracyAcrossConfigurations) {
  struct Case {
    double lambda, c, x, a;
  };
  for (const auto& k : {Case{0.5, 1.0, 0.0, 1.5}, Case{0.3, 2.0, -1.0, 2.5},
                        Case{0.8, 0.5, 0.0, 2.2}, Case{0.6, 1.0, 1.0, 2.0}}) {
    const auto p = det_problem(k.a, k.c, k.lambda, k.x);
    const auto plan = plan_identity(p);
    const auto mc = simulate_passage(p, 4, 10000, 3, plan.u);
    ASSERT_EQ(mc.n_censored, 0u);
    const auto r = identity_e_tau(p, plan, mc.mgf_nodes);
    EXPECT_NEAR(r.value, mc.e_tau_hat, 1e-7) << k.lambda << " " << k.c << " " << k.a;
    EXPECT_EQ(mc.e_tau_hat, std::round(mc.e_tau_hat));
  }
}

TEST(Identity, GaussianSandwich) {
  const auto p = gaussian_problem();
  const auto plan = plan_identity(p);
  const auto mc = simulate_passage(p, 100000, 1000000, 21, plan.u);
  const auto r = identity_e_tau(p, plan, mc.mgf_nodes);
  const double err = r.std_err + r.clip_err;
  EXPECT_LE(lower_bound_e_tau(p).value, r.value + 3 * err);
  EXPECT_LE(r.value - 3 * err, upper_bound_e_tau(p, 4.0).value);
  EXPECT_LT(std::abs(r.value - mc.e_tau_hat),
            3.0 * std::sqrt(err * err + mc.e_tau_se * mc.e_tau_se));
}

TEST(Certificate, GaussianSurvivalDominated) {
  const auto p = gaussian_problem();
  const auto c = exponential_certificate(p, 0.5);
  EXPECT_GT(c.alpha, 0.0);
  EXPECT_GT(1.0 + 2.0 * c.v_star * std::abs(c.c_top), 0.0);
  EXPECT_GT(c.v_star, -0.5);
  EXPECT_NEAR(c.alpha, -c.v_star * std::log(2.0), 1e-15);
  const auto mc = simulate_passage(p, 100000, 1000000, 99);
  for (const auto& pt : mc.survival_curve) {
    const double b = std::min(1.0, c.c_bound * std::exp(-c.alpha * pt.n));
    EXPECT_LE(pt.survival, b + 2.326 * std::sqrt(b * (1 - b) / mc.n_paths)) << "n=" << pt.n;
  }
}

TEST(Certificate, NoCrossingForNegativeDeterministic) {
  EXPECT_EQ(kind_of([] { exponential_certificate(det_problem(1.0, -1.0), 0.5); }),
            ErrorKind::no_crossing);
}

TEST(Certificate, RejectsDeltaOutsideUnitInterval) {
  EXPECT_EQ(kind_of([] { exponential_certificate(gaussian_problem(), 1.0); }),
            ErrorKind::precondition);
}

TEST(Certificate, DefaultTruncationLevel) {
  const auto p = gaussian_problem();
  const double n = default_n_cap(p);
  EXPECT_GT(n, p.a * (1 - p.lambda));
  EXPECT_GE(p.spec.mass_at_least(n), 1e-3);
}

TEST(SweepV, VacuousConstraintReachesEndOfGrid) {
  const auto grid = v_grid(0.5);
  ASSERT_EQ(grid.size(), 64u);
  EXPECT_NEAR(grid.front(), -0.5 * (1 - 1e-3), 1e-15);
  EXPECT_NEAR(grid.back(), -1e-4, 1e-18);
  const auto choice = sweep_v(0.5, 0.2, 0.0, [](double) { return true; });
  ASSERT_TRUE(choice);
  EXPECT_EQ(choice->v, grid.front());
}

TEST(SweepV, ConstraintBinds) {
  const auto choice = sweep_v(0.5, 0.0, 10.0, [](double) { return true; });
  ASSERT_TRUE(choice);
  EXPECT_GT(1.0 + 2.0 * choice->v * 10.0, 0.0);
  EXPECT_GT(choice->v, -0.05);
  EXPECT_FALSE(sweep_v(0.5, 0.0, 10.0, [](double) { return false; }));
}

TEST(Feasibility, DeterministicCertainInfinite) {
  const auto f = feasibility_report(det_problem(3.0));
  EXPECT_TRUE(f.certain_infinite);
  EXPECT_FALSE(f.crossing_possible);
  ASSERT_TRUE(f.theta);
  EXPECT_DOUBLE_EQ(*f.theta, 2.0);
}

TEST(Feasibility, GaussianFinite) {
  for (double a : {0.0, 1.0, 5.0}) {
    auto p = gaussian_problem();
    p.a = a;
    const auto f = feasibility_report(p);
    EXPECT_TRUE(f.crossing_possible);
    EXPECT_TRUE(f.finite_mean);
    EXPECT_FALSE(f.certain_infinite);
  }
}

TEST(Feasibility, TwoPointAtomAboveThreshold) {
  const PassageProblem p{0.5, 0.0, 1.9, InnovationSpec::two_point(1.0, -1.0, 0.5)};
  const auto f = feasibility_report(p);
  EXPECT_TRUE(f.crossing_possible);
  EXPECT_FALSE(f.certain_infinite);
}

TEST(Problem, Validation) {
  EXPECT_THROW(validate(PassageProblem{1.0, 0.0, 1.0}), Error);
  EXPECT_THROW(validate(PassageProblem{0.5, 2.0, 1.0}), Error);
  EXPECT_NO_THROW(validate(PassageProblem{0.5, 1.0, 1.0}));
}

}  // namespace
}  // namespace fpt
