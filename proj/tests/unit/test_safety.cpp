#include <gtest/gtest.h>

#include <random>

#include <nscbf/errors.hpp>
#include <nscbf/safety.hpp>

#include "unit/fixtures.hpp"

namespace nscbf {
namespace {

using testing::v2;

class SafetyCentered : public ::testing::Test {
 protected:
  PiecewiseMinBarrier b = from_rectangle(testing::centered_spec()).barrier;
  LinearInclusion sys = testing::example_system();
  Box box = Box::symmetric(2, 5.0);
};

TEST_F(SafetyCentered, AffineRowsSmoothPoint) {
  const std::vector<AffineRowInU> rows = g_affine_rows(b, sys, v2(0, 2));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].coeff, v2(1, 0));
  EXPECT_DOUBLE_EQ(rows[0].constant, 2.0);
  EXPECT_EQ(rows[0].source_index, 0);
}

TEST_F(SafetyCentered, AffineRowsAtKink) {
  const std::vector<AffineRowInU> rows = g_affine_rows(b, sys, v2(0, 0));
  ASSERT_EQ(rows.size(), 2u);
  const bool ordered = rows[0].coeff == v2(1, 0);
  EXPECT_EQ(rows[ordered ? 0 : 1].coeff, v2(1, 0));
  EXPECT_EQ(rows[ordered ? 1 : 0].coeff, v2(0, 1));
  EXPECT_DOUBLE_EQ(rows[0].constant, 0.0);
  EXPECT_DOUBLE_EQ(rows[1].constant, 0.0);
}

TEST_F(SafetyCentered, DisturbanceSupportTerm) {
  const std::vector<AffineRowInU> rows =
      g_affine_rows(b, testing::disturbed_system(0.1), v2(0, 2));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].constant, 2.1, 1e-15);
}

TEST_F(SafetyCentered, GEvalExamples) {
  EXPECT_DOUBLE_EQ(g_eval(b, sys, v2(0, 2), v2(-3, 0)), -1.0);
  EXPECT_DOUBLE_EQ(g_eval(b, sys, v2(0, 0), v2(1, -2)), 1.0);
  EXPECT_DOUBLE_EQ(g_eval(b, sys, v2(0, 0), v2(0, 0)), 0.0);
}

TEST_F(SafetyCentered, MinGOverBoxExamples) {
  EXPECT_NEAR(min_g_over_box(b, sys, box, v2(0.5, 2)), -3.0, 1e-12);
  EXPECT_NEAR(min_g_over_box(b, sys, box, v2(0, 0)), -5.0, 1e-12);
  const Box zero(v2(0, 0), v2(0, 0));
  EXPECT_NEAR(min_g_over_box(b, sys, zero, v2(0.2, 1.3)), g_eval(b, sys, v2(0.2, 1.3), v2(0, 0)),
              1e-12);
}

TEST_F(SafetyCentered, MinGMatchesGridOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 5.0);
  for (int t = 0; t < 50; ++t) {
    const Vec x = v2(u(rng), u(rng));
    double oracle = 1e300;
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 100; ++j)
        oracle = std::min(oracle, g_eval(b, sys, x, v2(-5 + 0.1 * i, -5 + 0.1 * j)));
    const double lp = min_g_over_box(b, sys, box, x);
    EXPECT_LE(lp, oracle + 1e-12);
    EXPECT_GE(lp, oracle - 0.1 - 1e-12);  // grid pitch times the row norm bound
  }
}

TEST_F(SafetyCentered, D0MembershipExamples) {
  EXPECT_TRUE(d0_membership(b, sys, box, v2(0.6, 2), v2(-3, 0), 0.0));
  EXPECT_FALSE(d0_membership(b, sys, box, v2(0.6, 2), v2(0, 0), 0.0));
  EXPECT_FALSE(d0_membership(b, sys, box, v2(0.6, 2), v2(-6, 0), 0.0));
  // g = 0 exactly: outside the open set, inside the closed one
  EXPECT_FALSE(d0_membership(b, sys, box, v2(0.6, 2), v2(-2, 0), 0.0));
  EXPECT_TRUE(d0_membership(b, sys, box, v2(0.6, 2), v2(-2, 0), 0.0, D0Variant::kClosed));
}

TEST_F(SafetyCentered, OracleSandwich) {
  const LinearInclusion dsys = testing::disturbed_system(0.2);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 5.0), uu(-5.0, 5.0);
  for (int t = 0; t < 500; ++t) {
    Vec x = v2(u(rng), u(rng));
    if (t % 5 == 0) x(1) = x(0);  // diagonal ties
    const Vec in = v2(uu(rng), uu(rng));
    const double exact = g_eval(b, dsys, x, in);
    EXPECT_LE(g_bruteforce_oracle(b, dsys, x, in, 50, t, false), exact + 1e-12);
    EXPECT_NEAR(g_bruteforce_oracle(b, dsys, x, in, 50, t, true), exact, 1e-12);
  }
}

TEST_F(SafetyCentered, OracleSinglePieceNoDisturbance) {
  for (int n : {1, 3, 17}) {
    EXPECT_DOUBLE_EQ(g_bruteforce_oracle(b, sys, v2(0, 2), v2(1, 1), n, 5, false),
                     g_eval(b, sys, v2(0, 2), v2(1, 1)));
  }
  EXPECT_THROW(g_bruteforce_oracle(b, sys, v2(0, 2), v2(1, 1), 0, 5), DomainError);
}

TEST_F(SafetyCentered, ConvexInInput) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 5.0), uu(-5.0, 5.0), l(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    Vec x = v2(u(rng), u(rng));
    if (t % 4 == 0) x(1) = 4.0 - x(0);  // anti-diagonal ties
    const Vec u1 = v2(uu(rng), uu(rng)), u2 = v2(uu(rng), uu(rng));
    const double lam = l(rng);
    EXPECT_LE(g_eval(b, sys, x, lam * u1 + (1 - lam) * u2),
              lam * g_eval(b, sys, x, u1) + (1 - lam) * g_eval(b, sys, x, u2) + 1e-9);
  }
}

TEST_F(SafetyCentered, UpperSemicontinuityAlongSequences) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 5.0), uu(-5.0, 5.0), dir(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    Vec x = v2(u(rng), u(rng));
    if (t % 2 == 0) x(1) = x(0);  // include tie points
    const Vec in = v2(uu(rng), uu(rng));
    const Vec d = v2(dir(rng), dir(rng));
    double limsup = -1e300;
    for (int k = 9; k <= 14; ++k) limsup = std::max(limsup, g_eval(b, sys, x + std::pow(10.0, -k) * d, in));
    EXPECT_LE(limsup, g_eval(b, sys, x, in) + 1e-6);
  }
}

TEST_F(SafetyCentered, LowerSemicontinuityOfD0) {
  // If g(x,u) < -eps, a radius delta is found by halving such that u stays
  // admissible on sampled states within delta of x.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 5.0), uu(-5.0, 5.0), dir(-1.0, 1.0);
  const double eps = 0.05;
  int tested = 0;
  while (tested < 200) {
    Vec x = v2(u(rng), u(rng));
    if (tested % 3 == 0) x(1) = x(0);
    const Vec in = v2(uu(rng), uu(rng));
    if (!(g_eval(b, sys, x, in) < -eps)) continue;
    ++tested;
    bool found = false;
    for (double delta = eps; delta > 1e-12 && !found; delta *= 0.5) {
      found = true;
      for (int k = 0; k < 16 && found; ++k) {
        Vec dx = v2(dir(rng), dir(rng));
        dx *= delta / std::max(dx.norm(), 1e-12);
        found = g_eval(b, sys, x + dx, in) < 0.0;
      }
    }
    EXPECT_TRUE(found) << "no admissible radius at (" << x(0) << ", " << x(1) << ")";
  }
}

TEST(ShellAndGamma, Membership) {
  const PiecewiseMinBarrier b = from_rectangle(testing::centered_spec()).barrier;
  const ShellSpec shell{0.2};
  EXPECT_TRUE(shell.contains(b, v2(0.5, 2)));
  EXPECT_TRUE(shell.contains(b, v2(0.7, 2)));
  EXPECT_FALSE(shell.contains(b, v2(0.75, 2)));
  EXPECT_FALSE(shell.contains(b, v2(0.4, 2)));
  const Gamma constant{Gamma::Kind::kConstant, 0.3};
  const Gamma scaled{Gamma::Kind::kBarrierScaled, 2.0};
  EXPECT_DOUBLE_EQ(constant(b, v2(0, 2)), 0.3);
  EXPECT_DOUBLE_EQ(scaled(b, v2(0, 2)), 1.0);
  EXPECT_DOUBLE_EQ(scaled(b, v2(2, 2)), 0.0);
}

}  // namespace
}  // namespace nscbf
