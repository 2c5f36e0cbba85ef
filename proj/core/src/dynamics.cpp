#include "nscbf/dynamics.hpp"

#include <string>

#include "nscbf/errors.hpp"

namespace nscbf {

LinearInclusion::LinearInclusion(Mat a_mat, Mat b_mat, ConvexPolytope disturbance)
    : a_(std::move(a_mat)), b_(std::move(b_mat)), w_(std::move(disturbance)) {
  const Eigen::Index n = a_.rows();
  if (n < 1 || n > kMaxAmbientDim || a_.cols() != n) {
    throw DimensionError("LinearInclusion: A must be square with dimension 1..3");
  }
  if (b_.rows() != n || b_.cols() < 1 || b_.cols() > kMaxAmbientDim) {
    throw DimensionError("LinearInclusion: B_in must be " + std::to_string(n) +
                         "xm with m in 1..3, got " + std::to_string(b_.rows()) + "x" +
                         std::to_string(b_.cols()));
  }
  if (!a_.allFinite() || !b_.allFinite()) throw DomainError("LinearInclusion: non-finite matrix");
  if (w_.empty()) throw DomainError("LinearInclusion: disturbance set must be nonempty");
  if (w_.dim() != n) throw DimensionError("LinearInclusion: disturbance dimension mismatch");
}

LinearInclusion::LinearInclusion(Mat a_mat, Mat b_mat)
    : LinearInclusion(a_mat, b_mat, ConvexPolytope::point(Vec::Zero(a_mat.rows()))) {}

Vec vector_field(const LinearInclusion& sys, const Vec& x, const Vec& u, const Vec& w) {
  if (x.size() != sys.state_dim() || w.size() != sys.state_dim() || u.size() != sys.input_dim()) {
    throw DimensionError("vector_field: dimension mismatch");
  }
  if (!sys.disturbance().contains(w, 1e-9)) throw DomainError("vector_field: w is outside W");
  return sys.flow(x, u, w);
}

Vec worst_case_disturbance(const LinearInclusion& sys, const Vec& zeta) {
  const std::vector<Vec>& vertices = sys.disturbance().vertices();
  if (zeta.size() != sys.state_dim()) throw DimensionError("worst_case_disturbance: dimension mismatch");
  std::size_t best = 0;
  double best_value = vertices[0].dot(zeta);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double v = vertices[i].dot(zeta);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return vertices[best];
}

}  // namespace nscbf
