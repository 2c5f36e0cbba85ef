#include "nscbf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "combinations.hpp"
#include "nscbf/errors.hpp"

namespace nscbf {
namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

void require_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

// Sorts lexicographically and drops points within kHullTol of their
// predecessor.
std::vector<Vec> sorted_unique(std::span<const Vec> points) {
  std::vector<Vec> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), lex_less);
  std::vector<Vec> out;
  out.reserve(pts.size());
  for (const Vec& p : pts) {
    if (out.empty() || (p - out.back()).cwiseAbs().maxCoeff() > kHullTol) out.push_back(p);
  }
  return out;
}

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool lex_less2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

// Andrew's monotone chain over 2D coordinates. Returns indices of the hull in
// counterclockwise order starting at the lexicographic minimum; collinear
// points are dropped.
std::vector<int> planar_hull_indices(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return lex_less2(pts[a], pts[b]); });
  if (order.size() <= 1) return order;

  std::vector<int> hull;
  hull.reserve(2 * order.size());
  for (int idx : order) {
    while (hull.size() >= 2 &&
           cross2(pts[hull[hull.size() - 2]], pts[hull.back()], pts[idx]) <= kHullTol) {
      hull.pop_back();
    }
    hull.push_back(idx);
  }
  const std::size_t lower_size = hull.size() + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    while (hull.size() >= lower_size &&
           cross2(pts[hull[hull.size() - 2]], pts[hull.back()], pts[*it]) <= kHullTol) {
      hull.pop_back();
    }
    hull.push_back(*it);
  }
  hull.pop_back();
  if (hull.size() == 2 && (pts[hull[0]] - pts[hull[1]]).cwiseAbs().maxCoeff() <= kHullTol) {
    hull.pop_back();
  }
  return hull;
}

std::vector<Halfspace> polygon_halfspaces(const std::vector<Vec>& ccw) {
  std::vector<Halfspace> rows;
  const std::size_t n = ccw.size();
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& a = ccw[i];
    const Vec& b = ccw[(i + 1) % n];
    Vec normal(2);
    normal << b(1) - a(1), a(0) - b(0);
    normal.normalize();
    rows.push_back({normal, normal.dot(a)});
  }
  return rows;
}

struct Hull3d {
  std::vector<Vec> vertices;
  std::optional<std::vector<Halfspace>> facets;
};

// Extreme points of a 3D point cloud. Degenerate clouds (coplanar, collinear,
// single point) are reduced in their affine hull.
Hull3d hull_3d(const std::vector<Vec>& pts) {
  Hull3d out;
  if (pts.size() == 1) {
    out.vertices = pts;
    return out;
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Vec& p : pts) centroid += p.head<3>();
  centroid /= static_cast<double>(pts.size());
  Eigen::MatrixXd centered(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    centered.row(static_cast<Eigen::Index>(i)) = (pts[i].head<3>() - centroid).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::Vector3d sv = svd.singularValues();
  const double scale = std::max(1.0, sv(0));
  int affine_dim = 0;
  for (int i = 0; i < 3; ++i) affine_dim += sv(i) > 1e-10 * scale ? 1 : 0;

  std::vector<char> extreme(pts.size(), 0);
  if (affine_dim == 0) {
    out.vertices = {pts.front()};
    return out;
  }
  if (affine_dim == 1) {
    const Eigen::Vector3d d = svd.matrixV().col(0);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double t = d.dot(pts[i].head<3>());
      if (t < d.dot(pts[lo].head<3>())) lo = i;
      if (t > d.dot(pts[hi].head<3>())) hi = i;
    }
    extreme[lo] = extreme[hi] = 1;
  } else if (affine_dim == 2) {
    const Eigen::Vector3d e1 = svd.matrixV().col(0);
    const Eigen::Vector3d e2 = svd.matrixV().col(1);
    std::vector<Eigen::Vector2d> flat;
    flat.reserve(pts.size());
    for (const Vec& p : pts) {
      const Eigen::Vector3d c = p.head<3>() - centroid;
      flat.emplace_back(e1.dot(c), e2.dot(c));
    }
    for (int idx : planar_hull_indices(flat)) extreme[idx] = 1;
  } else {
    const double dist_tol = 1e-10 * scale;
    std::vector<Halfspace> facets;
    const int n = static_cast<int>(pts.size());
    std::vector<double> s(pts.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          const Eigen::Vector3d a = pts[i].head<3>();
          Eigen::Vector3d normal = (pts[j].head<3>() - a).cross(pts[k].head<3>() - a);
          if (normal.norm() <= 1e-12 * scale * scale) continue;
          normal.normalize();
          double smax = -std::numeric_limits<double>::infinity();
          double smin = std::numeric_limits<double>::infinity();
          for (int l = 0; l < n; ++l) {
            s[l] = normal.dot(pts[l].head<3>() - a);
            smax = std::max(smax, s[l]);
            smin = std::min(smin, s[l]);
          }
          if (smax > dist_tol) {
            if (smin < -dist_tol) continue;
            normal = -normal;
            for (double& v : s) v = -v;
          }
          const double offset = normal.dot(a);
          const bool seen = std::any_of(facets.begin(), facets.end(), [&](const Halfspace& h) {
            return (h.normal.head<3>() - normal).norm() < 1e-9 &&
                   std::abs(h.offset - offset) < dist_tol;
          });
          if (seen) continue;
          Vec stored(3);
          stored = normal;
          facets.push_back({stored, offset});

          // Extreme points of this facet via a planar hull in its own basis.
          const Eigen::Vector3d e1 = normal.unitOrthogonal();
          const Eigen::Vector3d e2 = normal.cross(e1);
          std::vector<int> members;
          std::vector<Eigen::Vector2d> flat;
          for (int l = 0; l < n; ++l) {
            if (std::abs(s[l]) <= dist_tol) {
              members.push_back(l);
              const Eigen::Vector3d c = pts[l].head<3>() - a;
              flat.emplace_back(e1.dot(c), e2.dot(c));
            }
          }
          for (int idx : planar_hull_indices(flat)) extreme[members[idx]] = 1;
        }
      }
    }
    out.facets = std::move(facets);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (extreme[i]) out.vertices.push_back(pts[i]);
  }
  return out;
}

double segment_interior_distance(const Vec& x, const Vec& a, const Vec& b, bool& valid) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  valid = false;
  if (len2 <= 0.0) return 0.0;
  const double t = (x - a).dot(ab) / len2;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  valid = true;
  return (x - (a + t * ab)).norm();
}

double triangle_interior_distance(const Vec& x, const Vec& a, const Vec& b, const Vec& c,
                                  bool& valid) {
  const Vec e1 = b - a;
  const Vec e2 = c - a;
  const Vec r = x - a;
  const double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
  const double det = g11 * g22 - g12 * g12;
  valid = false;
  if (det <= 1e-18 * std::max(1.0, g11 * g22)) return 0.0;
  const double r1 = e1.dot(r), r2 = e2.dot(r);
  const double s = (g22 * r1 - g12 * r2) / det;
  const double t = (g11 * r2 - g12 * r1) / det;
  if (s < 0.0 || t < 0.0 || s + t > 1.0) return 0.0;
  valid = true;
  return (x - (a + s * e1 + t * e2)).norm();
}

}  // namespace

Box::Box(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_same_dim(lower_, upper_, "Box");
  if (lower_.size() == 0) throw DimensionError("Box: zero dimension");
  if (!lower_.allFinite() || !upper_.allFinite()) throw DomainError("Box: non-finite bound");
  if ((lower_.array() > upper_.array()).any()) throw DomainError("Box: lower > upper");
}

Box Box::symmetric(int dim, double half_width) {
  return Box(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
}

bool Box::contains(const Vec& x, double tol) const {
  require_same_dim(x, lower_, "Box::contains");
  return ((x.array() >= lower_.array() - tol) && (x.array() <= upper_.array() + tol)).all();
}

Vec Box::clamp(const Vec& x) const {
  require_same_dim(x, lower_, "Box::clamp");
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

std::vector<Vec> Box::corners() const {
  const int d = dim();
  std::vector<Vec> out;
  out.reserve(std::size_t{1} << d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Vec c(d);
    for (int i = 0; i < d; ++i) c(i) = (mask >> i) & 1u ? upper_(i) : lower_(i);
    out.push_back(c);
  }
  return out;
}

HalfspaceSet::HalfspaceSet(std::vector<Halfspace> rows, HalfspaceSense sense)
    : rows_(std::move(rows)), sense_(sense) {
  if (rows_.empty()) throw DomainError("HalfspaceSet: at least one row required");
  for (const Halfspace& h : rows_) {
    require_same_dim(h.normal, rows_.front().normal, "HalfspaceSet");
    if (h.normal.norm() == 0.0) throw DomainError("HalfspaceSet: zero normal");
  }
}

bool HalfspaceSet::contains(const Vec& x) const {
  for (const Halfspace& h : rows_) {
    const double v = h.normal.dot(x);
    const bool ok = sense_ == HalfspaceSense::kLessEqual ? v <= h.offset : v > h.offset;
    if (!ok) return false;
  }
  return true;
}

ConvexPolytope ConvexPolytope::from_points(std::span<const Vec> points) {
  if (points.empty()) throw DomainError("ConvexPolytope: empty point set");
  const Eigen::Index d = points.front().size();
  if (d < 1 || d > kMaxAmbientDim) {
    throw DimensionError("ConvexPolytope: dimension must be 1..3, got " + std::to_string(d));
  }
  for (const Vec& p : points) {
    require_same_dim(p, points.front(), "ConvexPolytope");
    if (!p.allFinite()) throw DomainError("ConvexPolytope: non-finite vertex");
  }
  if (d == 2) return convex_hull_planar(points);

  std::vector<Vec> pts = sorted_unique(points);
  if (d == 1) {
    std::vector<Vec> ends{pts.front()};
    if (pts.size() > 1) ends.push_back(pts.back());
    return ConvexPolytope(std::move(ends), std::nullopt);
  }
  Hull3d hull = hull_3d(pts);
  std::sort(hull.vertices.begin(), hull.vertices.end(), lex_less);
  return ConvexPolytope(std::move(hull.vertices), std::move(hull.facets));
}

ConvexPolytope ConvexPolytope::point(const Vec& p) {
  const Vec pts[] = {p};
  return from_points(pts);
}

ConvexPolytope ConvexPolytope::from_box(const Box& box) {
  const std::vector<Vec> corners = box.corners();
  return from_points(corners);
}

int ConvexPolytope::dim() const {
  return vertices_.empty() ? 0 : static_cast<int>(vertices_.front().size());
}

bool ConvexPolytope::contains(const Vec& x, double tol) const {
  if (empty()) return false;
  require_same_dim(x, vertices_.front(), "ConvexPolytope::contains");
  if (halfspaces_) {
    return std::all_of(halfspaces_->begin(), halfspaces_->end(),
                       [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset + tol; });
  }
  return point_distance(x, *this) <= tol;
}

ConvexPolytope convex_hull_planar(std::span<const Vec> points) {
  if (points.empty()) throw DomainError("convex_hull_planar: empty input");
  std::vector<Vec> pts = sorted_unique(points);
  std::vector<Eigen::Vector2d> flat;
  flat.reserve(pts.size());
  for (const Vec& p : pts) {
    if (p.size() != 2) throw DimensionError("convex_hull_planar: points must be 2D");
    flat.emplace_back(p(0), p(1));
  }
  std::vector<Vec> hull;
  for (int idx : planar_hull_indices(flat)) hull.push_back(pts[idx]);

  std::optional<std::vector<Halfspace>> rows;
  if (hull.size() >= 3) rows = polygon_halfspaces(hull);
  return ConvexPolytope(std::move(hull), std::move(rows));
}

ConvexPolytope minkowski_sum(const ConvexPolytope& p, const ConvexPolytope& q) {
  if (p.empty() || q.empty()) throw DomainError("minkowski_sum: empty operand");
  if (p.dim() != q.dim()) throw DimensionError("minkowski_sum: dimension mismatch");
  std::vector<Vec> sums;
  sums.reserve(p.vertices().size() * q.vertices().size());
  for (const Vec& a : p.vertices()) {
    for (const Vec& b : q.vertices()) sums.push_back(a + b);
  }
  return ConvexPolytope::from_points(sums);
}

ConvexPolytope scale_polytope(const ConvexPolytope& p, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("scale_polytope: lambda must be >= 0");
  if (p.empty()) throw DomainError("scale_polytope: empty polytope");
  if (lambda == 0.0) return ConvexPolytope::point(Vec::Zero(p.dim()));
  std::vector<Vec> scaled;
  scaled.reserve(p.vertices().size());
  for (const Vec& v : p.vertices()) scaled.push_back(lambda * v);
  return ConvexPolytope::from_points(scaled);
}

double support_function(const ConvexPolytope& p, const Vec& dir) {
  if (p.empty()) throw DomainError("support_function: empty polytope");
  require_same_dim(dir, p.vertices().front(), "support_function");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& v : p.vertices()) best = std::max(best, v.dot(dir));
  return best;
}

double point_distance(const Vec& x, const ConvexPolytope& p) {
  if (p.empty()) throw DomainError("point_distance: empty polytope");
  require_same_dim(x, p.vertices().front(), "point_distance");
  if (p.halfspaces()) {
    const bool inside = std::all_of(p.halfspaces()->begin(), p.halfspaces()->end(),
                                    [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset; });
    if (inside) return 0.0;
  }
  const std::vector<Vec>& v = p.vertices();
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& a : v) best = std::min(best, (x - a).norm());
  bool valid = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = segment_interior_distance(x, v[i], v[j], valid);
      if (valid) best = std::min(best, d);
    }
  }
  if (p.dim() == 3) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          const double d = triangle_interior_distance(x, v[i], v[j], v[k], valid);
          if (valid) best = std::min(best, d);
        }
      }
    }
  }
  return best;
}

double hausdorff_distance(const ConvexPolytope& p, const ConvexPolytope& q) {
  if (p.empty() || q.empty()) throw DomainError("hausdorff_distance: empty operand");
  if (p.dim() != q.dim()) throw DimensionError("hausdorff_distance: dimension mismatch");
  // The distance to a convex set is convex, so each one-sided excess is
  // attained at a vertex.
  double h = 0.0;
  for (const Vec& a : p.vertices()) h = std::max(h, point_distance(a, q));
  for (const Vec& b : q.vertices()) h = std::max(h, point_distance(b, p));
  return h;
}

bool approx_equal(const ConvexPolytope& p, const ConvexPolytope& q, double tol) {
  if (p.empty() || q.empty()) return p.empty() && q.empty();
  if (p.dim() != q.dim()) return false;
  auto covered = [tol](const std::vector<Vec>& from, const std::vector<Vec>& to) {
    return std::all_of(from.begin(), from.end(), [&](const Vec& a) {
      return std::any_of(to.begin(), to.end(),
                         [&](const Vec& b) { return (a - b).cwiseAbs().maxCoeff() <= tol; });
    });
  };
  return covered(p.vertices(), q.vertices()) && covered(q.vertices(), p.vertices());
}

double distance_to_boundary(const Vec& x, const MinAffineLevelSet& level_set) {
  const Box& window = level_set.window;
  const int n = window.dim();
  const int pieces = static_cast<int>(level_set.gradients.size());
  if (pieces == 0 || level_set.offsets.size() != level_set.gradients.size()) {
    throw DomainError("distance_to_boundary: malformed level set descriptor");
  }
  require_same_dim(x, window.lower(), "distance_to_boundary");

  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int face = 0; face < pieces; ++face) {
    // Inequalities a.y <= b describing the face's host region: every other
    // piece nonnegative, plus the window.
    std::vector<Vec> a_rows;
    std::vector<double> b_rows;
    for (int j = 0; j < pieces; ++j) {
      if (j == face) continue;
      a_rows.push_back(-level_set.gradients[j]);
      b_rows.push_back(level_set.offsets[j]);
    }
    for (int k = 0; k < n; ++k) {
      Vec e = Vec::Zero(n);
      e(k) = 1.0;
      a_rows.push_back(e);
      b_rows.push_back(window.upper()(k));
      a_rows.push_back(-e);
      b_rows.push_back(-window.lower()(k));
    }
    const int m = static_cast<int>(a_rows.size());
    std::vector<Vec> face_vertices;
    detail::for_each_combination(m, n - 1, [&](std::span<const int> subset) {
      Mat lhs(n, n);
      Vec rhs(n);
      lhs.row(0) = level_set.gradients[face].transpose();
      rhs(0) = -level_set.offsets[face];
      for (int r = 0; r < n - 1; ++r) {
        lhs.row(r + 1) = a_rows[subset[r]].transpose();
        rhs(r + 1) = b_rows[subset[r]];
      }
      Eigen::FullPivLU<Mat> lu(lhs);
      if (lu.rank() < n) return true;
      const Vec y = lu.solve(rhs);
      for (int r = 0; r < m; ++r) {
        if (a_rows[r].dot(y) > b_rows[r] + 1e-9 * std::max(1.0, std::abs(b_rows[r]))) return true;
      }
      face_vertices.push_back(y);
      return true;
    });
    if (face_vertices.empty()) continue;
    found = true;
    best = std::min(best, point_distance(x, ConvexPolytope::from_points(face_vertices)));
  }
  if (!found) throw DomainError("distance_to_boundary: no zero level set inside the window");
  return best;
}

}  // namespace nscbf
