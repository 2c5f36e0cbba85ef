#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nscbf/errors.hpp>
#include <nscbf/geometry.hpp>
#include <nscbf/barrier.hpp>

#include "unit/fixtures.hpp"

namespace nscbf {
namespace {

using testing::v2;

ConvexPolytope poly(std::initializer_list<Vec> pts) {
  std::vector<Vec> v(pts);
  return ConvexPolytope::from_points(v);
}

ConvexPolytope random_polygon(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(v2(u(rng), u(rng)));
  return ConvexPolytope::from_points(pts);
}

// Dense-sampling oracle for the Hausdorff distance of planar polygons: the
// excess of each boundary sampled at many points over the other set.
double sampled_hausdorff(const ConvexPolytope& p, const ConvexPolytope& q, int per_edge) {
  auto excess = [&](const ConvexPolytope& a, const ConvexPolytope& b) {
    double worst = 0.0;
    const auto& vs = a.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vec& s = vs[i];
      const Vec& t = vs[(i + 1) % vs.size()];
      for (int k = 0; k <= per_edge; ++k) {
        const Vec y = s + (t - s) * (static_cast<double>(k) / per_edge);
        worst = std::max(worst, point_distance(y, b));
      }
    }
    return worst;
  };
  return std::max(excess(p, q), excess(q, p));
}

TEST(Box, ValidatesBounds) {
  EXPECT_THROW(Box(v2(1, 0), v2(0, 1)), DomainError);
  EXPECT_THROW(Box(v2(0, 0), make_vec({1, 1, 1})), DimensionError);
  const Box b = Box::symmetric(2, 5.0);
  EXPECT_TRUE(b.contains(v2(5, -5)));
  EXPECT_FALSE(b.contains(v2(5.1, 0)));
  EXPECT_EQ(b.clamp(v2(7, -9)), v2(5, -5));
  EXPECT_EQ(b.corners().size(), 4u);
}

TEST(ConvexHull, SinglePoint) {
  const std::vector<Vec> pts{v2(0, 0)};
  const ConvexPolytope p = convex_hull_planar(pts);
  ASSERT_EQ(p.vertices().size(), 1u);
  EXPECT_EQ(p.vertices()[0], v2(0, 0));
}

TEST(ConvexHull, DropsInteriorPoint) {
  const std::vector<Vec> pts{v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1), v2(0.5, 0.5)};
  const ConvexPolytope p = convex_hull_planar(pts);
  ASSERT_EQ(p.vertices().size(), 4u);
  // counterclockwise from the lexicographic minimum
  EXPECT_EQ(p.vertices()[0], v2(0, 0));
  EXPECT_EQ(p.vertices()[1], v2(1, 0));
  EXPECT_EQ(p.vertices()[2], v2(1, 1));
  EXPECT_EQ(p.vertices()[3], v2(0, 1));
}

TEST(ConvexHull, CollinearReducesToSegment) {
  const std::vector<Vec> pts{v2(0, 0), v2(1, 0), v2(2, 0)};
  const ConvexPolytope p = convex_hull_planar(pts);
  ASSERT_EQ(p.vertices().size(), 2u);
  EXPECT_EQ(p.vertices()[0], v2(0, 0));
  EXPECT_EQ(p.vertices()[1], v2(2, 0));
}

TEST(ConvexHull, RejectsEmptyAndNonPlanar) {
  EXPECT_THROW(convex_hull_planar(std::vector<Vec>{}), DomainError);
  EXPECT_THROW(convex_hull_planar(std::vector<Vec>{make_vec({0, 0, 0})}), DimensionError);
}

TEST(ConvexPolytope, HalfspacesMatchVertices) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const ConvexPolytope p = random_polygon(rng, 8);
    if (!p.halfspaces()) continue;
    for (const Halfspace& h : *p.halfspaces()) {
      double best = -1e300;
      for (const Vec& v : p.vertices()) {
        EXPECT_LE(h.normal.dot(v), h.offset + 1e-9);
        best = std::max(best, h.normal.dot(v));
      }
      EXPECT_NEAR(best, h.offset, 1e-9);
    }
  }
}

TEST(ConvexPolytope, ThreeDimensionalHull) {
  std::vector<Vec> pts;
  for (double x : {0.0, 1.0})
    for (double y : {0.0, 1.0})
      for (double z : {0.0, 1.0}) pts.push_back(make_vec({x, y, z}));
  pts.push_back(make_vec({0.5, 0.5, 0.5}));
  const ConvexPolytope cube = ConvexPolytope::from_points(pts);
  EXPECT_EQ(cube.vertices().size(), 8u);
  EXPECT_TRUE(cube.contains(make_vec({0.2, 0.7, 0.9})));
  EXPECT_FALSE(cube.contains(make_vec({1.2, 0.5, 0.5})));
  EXPECT_DOUBLE_EQ(support_function(cube, make_vec({1, 1, 1})), 3.0);
  EXPECT_NEAR(point_distance(make_vec({2, 0.5, 0.5}), cube), 1.0, 1e-12);
}

TEST(MinkowskiSum, IdentityElement) {
  const ConvexPolytope p = poly({v2(0, 0), v2(2, 0), v2(1, 3)});
  const ConvexPolytope s = minkowski_sum(p, ConvexPolytope::point(v2(0, 0)));
  EXPECT_TRUE(approx_equal(s, p, 1e-12));
}

TEST(MinkowskiSum, SegmentsMakeSquare) {
  const ConvexPolytope a = poly({v2(0, 0), v2(1, 0)});
  const ConvexPolytope b = poly({v2(0, 0), v2(0, 1)});
  const ConvexPolytope s = minkowski_sum(a, b);
  EXPECT_TRUE(approx_equal(s, poly({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)}), 1e-12));
}

TEST(MinkowskiSum, UnitSquaresDouble) {
  const ConvexPolytope sq = ConvexPolytope::from_box(Box(v2(0, 0), v2(1, 1)));
  const ConvexPolytope s = minkowski_sum(sq, sq);
  EXPECT_TRUE(approx_equal(s, ConvexPolytope::from_box(Box(v2(0, 0), v2(2, 2))), 1e-12));
}

TEST(MinkowskiSum, DimensionMismatch) {
  EXPECT_THROW(minkowski_sum(ConvexPolytope::point(v2(0, 0)),
                             ConvexPolytope::point(make_vec({0, 0, 0}))),
               DimensionError);
}

TEST(MinkowskiSum, CommutativeAndAssociative) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const ConvexPolytope a = random_polygon(rng, 5);
    const ConvexPolytope b = random_polygon(rng, 4);
    const ConvexPolytope c = random_polygon(rng, 3);
    EXPECT_TRUE(approx_equal(minkowski_sum(a, b), minkowski_sum(b, a), 1e-12));
    EXPECT_TRUE(approx_equal(minkowski_sum(minkowski_sum(a, b), c),
                             minkowski_sum(a, minkowski_sum(b, c)), 1e-12));
  }
}

TEST(MinkowskiSum, SupportFunctionIsAdditive) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  const ConvexPolytope a = random_polygon(rng, 6);
  const ConvexPolytope b = random_polygon(rng, 6);
  const ConvexPolytope s = minkowski_sum(a, b);
  for (int t = 0; t < 100; ++t) {
    const Vec d = v2(n01(rng), n01(rng));
    EXPECT_NEAR(support_function(s, d), support_function(a, d) + support_function(b, d), 1e-12);
  }
}

TEST(ScalePolytope, Examples) {
  const ConvexPolytope p = poly({v2(0, 0), v2(2, 0), v2(1, 3)});
  EXPECT_TRUE(approx_equal(scale_polytope(p, 1.0), p, 0.0));
  const ConvexPolytope z = scale_polytope(p, 0.0);
  ASSERT_EQ(z.vertices().size(), 1u);
  EXPECT_EQ(z.vertices()[0], v2(0, 0));
  const ConvexPolytope big = ConvexPolytope::from_box(Box(v2(0, 0), v2(2, 2)));
  EXPECT_TRUE(approx_equal(scale_polytope(big, 0.5),
                           ConvexPolytope::from_box(Box(v2(0, 0), v2(1, 1))), 1e-15));
  EXPECT_THROW(scale_polytope(p, -0.1), DomainError);
}

TEST(SupportFunction, Examples) {
  EXPECT_DOUBLE_EQ(support_function(ConvexPolytope::from_box(Box::symmetric(2, 5)), v2(1, 0)), 5.0);
  EXPECT_DOUBLE_EQ(support_function(ConvexPolytope::point(v2(0, 0)), v2(3, -7)), 0.0);
  EXPECT_DOUBLE_EQ(support_function(poly({v2(1, 0), v2(0, 1)}), v2(1, 1)), 1.0);
  EXPECT_THROW(support_function(ConvexPolytope(), v2(1, 0)), DomainError);
}

TEST(Hausdorff, Examples) {
  const ConvexPolytope sq = ConvexPolytope::from_box(Box(v2(0, 0), v2(1, 1)));
  EXPECT_DOUBLE_EQ(hausdorff_distance(sq, sq), 0.0);
  const ConvexPolytope moved = ConvexPolytope::from_box(Box(v2(1, 0), v2(2, 1)));
  EXPECT_NEAR(hausdorff_distance(sq, moved), 1.0, 1e-12);
  EXPECT_NEAR(hausdorff_distance(ConvexPolytope::point(v2(0, 0)),
                                 ConvexPolytope::from_box(Box::symmetric(2, 1))),
              std::sqrt(2.0), 1e-12);
  EXPECT_THROW(hausdorff_distance(ConvexPolytope(), sq), DomainError);
}

TEST(Hausdorff, MatchesSamplingOracleAndTriangleInequality) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 60; ++t) {
    const ConvexPolytope a = random_polygon(rng, 6);
    const ConvexPolytope b = random_polygon(rng, 6);
    const ConvexPolytope c = random_polygon(rng, 6);
    const double ab = hausdorff_distance(a, b);
    EXPECT_NEAR(ab, hausdorff_distance(b, a), 1e-12);
    // the sampled oracle is a lower bound that converges from below
    const double oracle = sampled_hausdorff(a, b, 400);
    EXPECT_LE(oracle, ab + 1e-12);
    EXPECT_GE(oracle, ab - 0.05);
    EXPECT_LE(ab, hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-12);
  }
}

TEST(DistanceToBoundary, CenteredRectangle) {
  const RectangleObstacle obs = from_rectangle(testing::centered_spec());
  const MinAffineLevelSet level = obs.barrier.zero_level_set(Box::symmetric(2, 10));
  EXPECT_NEAR(distance_to_boundary(v2(0, 2), level), 0.5, 1e-12);
  EXPECT_NEAR(distance_to_boundary(v2(0, 0), level), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(distance_to_boundary(v2(0.5, 2), level), 0.0, 1e-12);
  // inside the obstacle the nearest boundary point is on a face too
  EXPECT_NEAR(distance_to_boundary(v2(2, 2), level), 1.5, 1e-12);
}

TEST(DistanceToBoundary, MatchesDenseBoundarySampling) {
  const RectangleObstacle obs = from_rectangle(testing::centered_spec());
  const MinAffineLevelSet level = obs.barrier.zero_level_set(Box::symmetric(2, 10));
  // boundary of [0.5, 3.5]^2 sampled densely
  std::vector<Vec> boundary;
  for (int k = 0; k <= 3000; ++k) {
    const double s = 0.5 + 3.0 * k / 3000.0;
    boundary.push_back(v2(s, 0.5));
    boundary.push_back(v2(s, 3.5));
    boundary.push_back(v2(0.5, s));
    boundary.push_back(v2(3.5, s));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const Vec x = v2(u(rng), u(rng));
    double oracle = 1e300;
    for (const Vec& y : boundary) oracle = std::min(oracle, (x - y).norm());
    const double d = distance_to_boundary(x, level);
    EXPECT_LE(d, oracle + 1e-12);
    EXPECT_GE(d, oracle - 1e-3);
  }
}

TEST(DistanceToBoundary, OneLipschitz) {
  const RectangleObstacle obs = from_rectangle(testing::centered_spec());
  const MinAffineLevelSet level = obs.barrier.zero_level_set(Box::symmetric(2, 10));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 6.0);
  for (int t = 0; t < 500; ++t) {
    const Vec x = v2(u(rng), u(rng)), y = v2(u(rng), u(rng));
    EXPECT_LE(std::abs(distance_to_boundary(x, level) - distance_to_boundary(y, level)),
              (x - y).norm() + 1e-9);
  }
}

TEST(DistanceToBoundary, NoLevelSetInWindowThrows) {
  const RectangleObstacle obs = from_rectangle(testing::centered_spec());
  const MinAffineLevelSet level = obs.barrier.zero_level_set(Box(v2(-9, -9), v2(-8, -8)));
  EXPECT_THROW(distance_to_boundary(v2(0, 0), level), DomainError);
}

TEST(HalfspaceSet, StrictAndNonStrict) {
  const HalfspaceSet le({{v2(1, 0), 1.0}}, HalfspaceSense::kLessEqual);
  const HalfspaceSet gt({{v2(1, 0), 1.0}}, HalfspaceSense::kGreater);
  EXPECT_TRUE(le.contains(v2(1, 0)));
  EXPECT_FALSE(gt.contains(v2(1, 0)));
  EXPECT_TRUE(gt.contains(v2(1.5, 0)));
  EXPECT_THROW(HalfspaceSet({}, HalfspaceSense::kLessEqual), DomainError);
  EXPECT_THROW(HalfspaceSet({{v2(0, 0), 1.0}}, HalfspaceSense::kLessEqual), DomainError);
}

}  // namespace
}  // namespace nscbf
