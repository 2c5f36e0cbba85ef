#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nscbf/types.hpp"

namespace nscbf {

inline constexpr double kHullTol = 1e-12;

/// Axis-aligned box {x : lower <= x <= upper}.
class Box {
 public:
  Box(Vec lower, Vec upper);
  static Box symmetric(int dim, double half_width);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  bool contains(const Vec& x, double tol = 0.0) const;
  Vec center() const { return 0.5 * (lower_ + upper_); }
  Vec clamp(const Vec& x) const;
  std::vector<Vec> corners() const;

 private:
  Vec lower_;
  Vec upper_;
};

struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

enum class HalfspaceSense { kLessEqual, kGreater };

/// Intersection of rows <normal, x> (<= | >) offset.
class HalfspaceSet {
 public:
  HalfspaceSet(std::vector<Halfspace> rows, HalfspaceSense sense);

  const std::vector<Halfspace>& rows() const { return rows_; }
  HalfspaceSense sense() const { return sense_; }
  int dim() const { return static_cast<int>(rows_.front().normal.size()); }
  bool contains(const Vec& x) const;

 private:
  std::vector<Halfspace> rows_;
  HalfspaceSense sense_;
};

/// Compact convex polytope in dimension <= 3 stored by its extreme points.
///
/// Vertices are canonical: planar polygons run counterclockwise from the
/// lexicographic minimum, 1D and 3D vertex lists are sorted
/// lexicographically. The facet description is cached when the polytope is
/// full-dimensional in 2D or 3D.
class ConvexPolytope;
ConvexPolytope convex_hull_planar(std::span<const Vec> points);

class ConvexPolytope {
 public:
  ConvexPolytope() = default;

  static ConvexPolytope from_points(std::span<const Vec> points);
  static ConvexPolytope point(const Vec& p);
  static ConvexPolytope from_box(const Box& box);

  bool empty() const { return vertices_.empty(); }
  int dim() const;
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::optional<std::vector<Halfspace>>& halfspaces() const { return halfspaces_; }

  bool contains(const Vec& x, double tol = 1e-9) const;

 private:
  ConvexPolytope(std::vector<Vec> vertices, std::optional<std::vector<Halfspace>> halfspaces)
      : vertices_(std::move(vertices)), halfspaces_(std::move(halfspaces)) {}

  std::vector<Vec> vertices_;
  std::optional<std::vector<Halfspace>> halfspaces_;

  friend ConvexPolytope convex_hull_planar(std::span<const Vec> points);
};

/// Piecewise-affine zero level set {y : min_i <g_i, y> + o_i = 0} clipped to
/// a bounding window.
struct MinAffineLevelSet {
  std::vector<Vec> gradients;
  std::vector<double> offsets;
  Box window;
};

ConvexPolytope convex_hull_planar(std::span<const Vec> points);
ConvexPolytope minkowski_sum(const ConvexPolytope& p, const ConvexPolytope& q);
ConvexPolytope scale_polytope(const ConvexPolytope& p, double lambda);
double support_function(const ConvexPolytope& p, const Vec& dir);

/// Euclidean distance from x to the polytope (0 inside).
double point_distance(const Vec& x, const ConvexPolytope& p);
double hausdorff_distance(const ConvexPolytope& p, const ConvexPolytope& q);

/// Vertex-set equality up to tol, independent of vertex order.
bool approx_equal(const ConvexPolytope& p, const ConvexPolytope& q, double tol);

double distance_to_boundary(const Vec& x, const MinAffineLevelSet& level_set);

}  // namespace nscbf
