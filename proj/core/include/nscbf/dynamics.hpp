#pragma once

#include "nscbf/geometry.hpp"

namespace nscbf {

/// x' in A x + B_in u + W with W a compact convex polytope.
class LinearInclusion {
 public:
  LinearInclusion(Mat a_mat, Mat b_mat, ConvexPolytope disturbance);
  /// Same system with W = {0}.
  LinearInclusion(Mat a_mat, Mat b_mat);

  int state_dim() const { return static_cast<int>(a_.rows()); }
  int input_dim() const { return static_cast<int>(b_.cols()); }
  const Mat& a_mat() const { return a_; }
  const Mat& b_mat() const { return b_; }
  const ConvexPolytope& disturbance() const { return w_; }

  /// A x + B_in u + w without checking w in W.
  Vec flow(const Vec& x, const Vec& u, const Vec& w) const { return a_ * x + b_ * u + w; }

 private:
  Mat a_;
  Mat b_;
  ConvexPolytope w_;
};

/// Constant input map U(x) = box.
struct InputMap {
  Box box;

  const Box& at(const Vec& /*x*/) const { return box; }
};

/// A x + B_in u + w; throws DomainError when w is outside W (tolerance 1e-9).
Vec vector_field(const LinearInclusion& sys, const Vec& x, const Vec& u, const Vec& w);

/// argmax over the vertices of W of <zeta, w>; ties go to the first vertex in
/// canonical order.
Vec worst_case_disturbance(const LinearInclusion& sys, const Vec& zeta);

}  // namespace nscbf
