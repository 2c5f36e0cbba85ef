#include <gtest/gtest.h>

#include <random>

#include <nscbf/controller.hpp>
#include <nscbf/safety.hpp>

#include "unit/fixtures.hpp"

namespace nscbf {
namespace {

using testing::v2;

TEST(KappaStar, BoundaryFace) {
  const SafeController ctrl = testing::centered_controller();
  EXPECT_LE((kappa_star(ctrl, v2(0.5, 2)) - v2(-2, 0)).norm(), 1e-12);
  // independent check: the QP oracle on the same constraints
  const ControlEvaluation e = evaluate(ctrl, v2(0.5, 2));
  const QpSolution o = qp_oracle(
      QuadraticProgram(Mat::Identity(2, 2), Vec::Zero(2), e.constraints), 101, 500);
  EXPECT_LE((o.u_star - e.u).norm(), 1e-6);
}

TEST(KappaStar, DeepInsideIsZero) {
  const SafeController ctrl = testing::centered_controller();
  const ControlEvaluation e = evaluate(ctrl, v2(0, 2));
  EXPECT_DOUBLE_EQ(e.barrier_value, -0.5);
  EXPECT_DOUBLE_EQ(e.relax, 50.0);
  EXPECT_EQ(e.u, v2(0, 0));
}

TEST(KappaStar, ZeroGainTrackingEqualsMinNorm) {
  const SafeController plain = testing::scenario_controller();
  const SafeController tracking(plain.barrier(), plain.system(), plain.smoothing(),
                                CostSpec{CostKind::kNominalTracking, Mat::Zero(2, 2)});
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ux(-1.0, 5.0), uy(-4.0, 2.0);
  for (int t = 0; t < 300; ++t) {
    const Vec x = v2(ux(rng), uy(rng));
    if (plain.barrier().eval(x) > 0.2) continue;
    EXPECT_EQ(kappa_star(plain, x), kappa_star(tracking, x));
  }
}

TEST(KappaStar, TrackingFollowsNominalDeepInside) {
  const SafeController plain = testing::scenario_controller();
  const SafeController tracking(plain.barrier(), plain.system(), plain.smoothing(),
                                CostSpec{CostKind::kNominalTracking, Mat::Identity(2, 2)});
  // B(-1, 2) = -1.5: constraints relaxed by 150, so u* = u_nom
  EXPECT_LE((kappa_star(tracking, v2(-1, 2)) - v2(1, -2)).norm(), 1e-12);
}

TEST(NominalInput, Examples) {
  const SafeController base = testing::scenario_controller();
  const SafeController ident(base.barrier(), base.system(), base.smoothing(),
                             CostSpec{CostKind::kNominalTracking, Mat::Identity(2, 2)});
  EXPECT_EQ(nominal_input(ident, v2(1, -2)), v2(-1, 2));
  EXPECT_EQ(nominal_input(ident, v2(0, 0)), v2(0, 0));
  const SafeController zero(base.barrier(), base.system(), base.smoothing(),
                            CostSpec{CostKind::kNominalTracking, Mat::Zero(2, 2)});
  EXPECT_EQ(nominal_input(zero, v2(3, 7)), v2(0, 0));
  EXPECT_THROW(nominal_input(base, v2(1, 1)), DomainError);
}

TEST(SafeController, Validation) {
  const SafeController base = testing::scenario_controller();
  SmoothingParams p;
  p.input_box = Box::symmetric(3, 5);
  EXPECT_THROW(SafeController(base.barrier(), base.system(), p), DimensionError);
  p = SmoothingParams{};
  p.alpha = 1e-12;
  EXPECT_THROW(SafeController(base.barrier(), base.system(), p), DomainError);
  EXPECT_THROW(SafeController(base.barrier(), base.system(), SmoothingParams{},
                              CostSpec{CostKind::kNominalTracking, Mat::Zero(3, 2)}),
               DimensionError);
  const PiecewiseMinBarrier b3({{make_vec({1, 0, 0}), 0.0}});
  EXPECT_THROW(SafeController(b3, base.system(), SmoothingParams{}), DimensionError);
}

TEST(KappaStar, InfeasibleIsAnErrorWithDiagnostics) {
  SmoothingParams p;
  p.input_box = Box(v2(0, 0), v2(0, 0));
  const SafeController ctrl = testing::centered_controller(p);
  // shell state where g(x, 0) = 2 > 0
  try {
    kappa_star(ctrl, v2(0.6, 2));
    FAIL() << "expected InfeasibleConstraintsError";
  } catch (const InfeasibleConstraintsError& e) {
    EXPECT_NEAR(e.barrier_value(), 0.1, 1e-15);
    EXPECT_EQ(e.active().exact, std::vector<int>{0});
    EXPECT_EQ(e.constraints().rows().size(), 1u);
    EXPECT_NE(std::string(e.what()).find("B(x) = "), std::string::npos);
  }
}

TEST(KappaStar, FeasibleAndSafeOnSamples) {
  const SafeController ctrl = testing::scenario_controller();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(-1.0, 5.0), uy(-4.0, 2.0);
  int shell = 0;
  for (int t = 0; t < 3000; ++t) {
    const Vec x = v2(ux(rng), uy(rng));
    const double b = ctrl.barrier().eval(x);
    if (b > 0.2) continue;
    const ControlEvaluation e = evaluate(ctrl, x);
    EXPECT_TRUE(e.constraints.contains(e.u, 1e-9));
    EXPECT_TRUE(ctrl.input_box().contains(e.u, 1e-9));
    if (b >= 0.0) {
      ++shell;
      EXPECT_LE(g_eval(ctrl.barrier(), ctrl.system(), x, e.u), 1e-9);
    }
  }
  EXPECT_GT(shell, 50);
}

}  // namespace
}  // namespace nscbf
