#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "fpt/error.hpp"
#include "fpt/innovations.hpp"

namespace fpt {
namespace {

std::vector<InnovationSpec> registry() {
  return {InnovationSpec::gaussian(0.0, 1.0),
          InnovationSpec::gaussian(-0.3, 2.0),
          InnovationSpec::deterministic(1.0),
          InnovationSpec::two_point(1.0, -1.0, 0.5),
          InnovationSpec::stable(1.5, 1.0, 0.0),
          truncate_cap_above(InnovationSpec::gaussian(0.0, 1.0), 0.5),
          truncate_floor_positive(InnovationSpec::gaussian(0.0, 1.0), 1.0)};
}

TEST(Psi, GaussianIsHalfSquare) {
  EXPECT_DOUBLE_EQ(InnovationSpec::gaussian(0.0, 1.0).psi(2.0), 2.0);
}

TEST(Psi, DeterministicIsLinear) {
  EXPECT_DOUBLE_EQ(InnovationSpec::deterministic(1.0).psi(3.0), 3.0);
}

TEST(Psi, StableAlphaTwoMatchesGaussian) {
  EXPECT_NEAR(InnovationSpec::stable(2.0, 0.5, 0.0).psi(1.0), 0.5, 1e-15);
}

TEST(Psi, StableMatchesClosedForm) {
  const auto s = InnovationSpec::stable(1.5, 1.0, 0.3);
  for (double u : {0.5, 1.0, 2.0})
    EXPECT_NEAR(s.psi(u), 0.3 * u + std::pow(u, 1.5), 1e-14);
}

TEST(Psi, ZeroAtOriginAndConvex) {
  for (const auto& s : registry()) {
    EXPECT_EQ(s.psi(0.0), 0.0) << s.describe();
    const double h = 0.05;
    for (double u = h; u < 6.0; u += h) {
      const double d2 = s.psi(u + h) - 2.0 * s.psi(u) + s.psi(u - h);
      EXPECT_GE(d2, -1e-9) << s.describe() << " u=" << u;
    }
  }
}

TEST(Psi, TwoPointExact) {
  const auto s = InnovationSpec::two_point(1.0, -1.0, 0.5);
  EXPECT_NEAR(s.psi(1.3), std::log(std::cosh(1.3)), 1e-15);
}

TEST(Sample, DeterministicRepeats) {
  Stream rng(1, 0);
  const auto v = InnovationSpec::deterministic(1.0).sample(rng, 3);
  EXPECT_EQ(v, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(Sample, TwoPointMeanNearZero) {
  Stream rng(42, 0);
  const auto v = InnovationSpec::two_point(1.0, -1.0, 0.5).sample(rng, 1000000);
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  EXPECT_LT(std::abs(m), 4e-3);
}

TEST(Sample, SeededStreamsRepeat) {
  const auto g = InnovationSpec::gaussian(0.0, 1.0);
  Stream a(42, 0), b(42, 0);
  EXPECT_EQ(g.sample(a, 100), g.sample(b, 100));
}

TEST(Sample, StableBelowOneIsRefused) {
  const auto s = InnovationSpec::stable(0.5, 1.0, 0.0);
  EXPECT_FALSE(s.can_sample());
  Stream rng(1, 0);
  try {
    s.draw(rng);
    FAIL() << "expected unsupported sampler";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_sampler);
  }
}

TEST(Sample, StableMomentsAgreeWithLaw) {
  const auto s = InnovationSpec::stable(1.5, 1.0, 0.3);
  Stream rng(5, 0);
  const auto v = s.sample(rng, 200000);
  double above = 0.0;
  for (double x : v) above += x > 0.0;
  above /= v.size();
  const double p = s.survival(0.0);
  EXPECT_NEAR(above, p, 4.0 * std::sqrt(p * (1 - p) / v.size()));
}

TEST(Invariants, RejectsBadParameters) {
  EXPECT_THROW(InnovationSpec::gaussian(0.0, 0.0), Error);
  EXPECT_THROW(InnovationSpec::two_point(-1.0, 1.0, 0.5), Error);
  EXPECT_THROW(InnovationSpec::two_point(1.0, -1.0, 1.0), Error);
  EXPECT_THROW(InnovationSpec::stable(1.5, 0.0, 0.0), Error);
}

TEST(CapAbove, DeterministicAboveCap) {
  const auto t = truncate_cap_above(InnovationSpec::deterministic(2.0), 1.0).simplified();
  ASSERT_TRUE(std::holds_alternative<Deterministic>(t.family()));
  EXPECT_EQ(std::get<Deterministic>(t.family()).value, 1.0);
  EXPECT_DOUBLE_EQ(t.psi(2.0), 2.0);
}

TEST(CapAbove, GaussianAtZeroSlope) {
  const auto t = truncate_cap_above(InnovationSpec::gaussian(0.0, 1.0), 0.0);
  const double h = 1e-5;
  const double slope = (t.psi(h) - t.psi(0.0)) / h;
  EXPECT_NEAR(slope, -1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-5);
  EXPECT_NEAR(*t.mean(), -1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-10);
}

TEST(CapAbove, TwoPointNoOp) {
  const auto base = InnovationSpec::two_point(1.0, -1.0, 0.5);
  const auto t = truncate_cap_above(base, 1.0).simplified();
  ASSERT_TRUE(std::holds_alternative<TwoPoint>(t.family()));
  const auto tp = std::get<TwoPoint>(t.family());
  EXPECT_EQ(tp.high, 1.0);
  EXPECT_EQ(tp.low, -1.0);
  EXPECT_EQ(tp.p_high, 0.5);
  for (double u : {0.3, 1.0, 4.0}) EXPECT_NEAR(t.psi(u), base.psi(u), 1e-15);
}

TEST(FloorPositive, TwoPointRelabel) {
  const auto t =
      truncate_floor_positive(InnovationSpec::two_point(2.0, -1.0, 0.5), 1.0).simplified();
  ASSERT_TRUE(std::holds_alternative<TwoPoint>(t.family()));
  const auto tp = std::get<TwoPoint>(t.family());
  EXPECT_EQ(tp.high, 1.0);
  EXPECT_EQ(tp.low, -1.0);
  EXPECT_EQ(tp.p_high, 0.5);
}

TEST(FloorPositive, GaussianAtomMass) {
  const auto t = truncate_floor_positive(InnovationSpec::gaussian(0.0, 1.0), 1.0);
  EXPECT_NEAR(t.mass_at_least(1.0), 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(t.mass_at_least(1.0), 0.1587, 1e-4);
  ASSERT_TRUE(t.upper_bound());
  EXPECT_EQ(*t.upper_bound(), 1.0);
}

TEST(FloorPositive, DeterministicNegativeIsInfeasible) {
  try {
    truncate_floor_positive(InnovationSpec::deterministic(-1.0), 1.0);
    FAIL() << "expected infeasible truncation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible_truncation);
  }
}

TEST(FloorPositive, SatisfiesSlopeForm) {
  // psi(u) = uN - g(u) with g >= 0 and g(u)/u -> 0
  const auto t = truncate_floor_positive(InnovationSpec::gaussian(0.0, 1.0), 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double u : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const double g = u - t.psi(u);
    EXPECT_GE(g, 0.0);
    EXPECT_LT(g / u, prev);
    prev = g / u;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Truncation, PsiDominated) {
  const auto base = InnovationSpec::gaussian(0.0, 1.0);
  const auto cap = truncate_cap_above(base, 0.5);
  const auto flo = truncate_floor_positive(base, 1.0);
  for (double u = 0.0; u <= 8.0; u += 0.25) {
    EXPECT_LE(cap.psi(u), base.psi(u) + 1e-14);
    EXPECT_LE(flo.psi(u), base.psi(u) + 1e-14);
  }
}

TEST(Truncation, CoupledDrawsDominated) {
  const auto base = InnovationSpec::stable(1.5, 1.0, 0.0);
  const auto cap = truncate_cap_above(base, 0.5);
  const auto flo = truncate_floor_positive(base, 1.0);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    Stream r0(9, i), r1(9, i), r2(9, i);
    const double e = base.draw(r0);
    EXPECT_LE(cap.draw(r1), e);
    EXPECT_LE(flo.draw(r2), e);
  }
}

TEST(Diagnostics, DeterministicExact) {
  Stream rng(1, 0);
  const auto d = diagnostics(InnovationSpec::deterministic(1.0), rng, 10000);
  EXPECT_TRUE(d.exact);
  EXPECT_DOUBLE_EQ(d.log_moment, std::log(2.0));
  EXPECT_EQ(d.neg_moment, 0.0);
  ASSERT_TRUE(d.upper_bound);
}

TEST(Diagnostics, TwoPointExact) {
  Stream rng(1, 0);
  const auto d = diagnostics(InnovationSpec::two_point(1.0, -3.0, 0.5), rng, 10000);
  EXPECT_DOUBLE_EQ(d.log_moment, 0.5 * std::log(2.0) + 0.5 * std::log(4.0));
}

TEST(Diagnostics, GaussianNegativeMoment) {
  Stream rng(42, 0);
  const auto d = diagnostics(InnovationSpec::gaussian(0.0, 1.0), rng, 1000000, 0.5);
  // E (eta^-)^{1/2} = 2^{1/4} Gamma(3/4) / (2 sqrt(pi))
  const double exact =
      std::pow(2.0, 0.25) * std::tgamma(0.75) / (2.0 * std::sqrt(std::numbers::pi));
  EXPECT_LT(std::abs(d.neg_moment - exact), 3.0 * d.neg_moment_se);
  EXPECT_FALSE(d.upper_bound);
  EXPECT_THROW(diagnostics(InnovationSpec::gaussian(0.0, 1.0), rng, 100), Error);
}

}  // namespace
}  // namespace fpt
