#pragma once

#include <Eigen/Dense>

namespace nscbf {

// States and inputs live in dimension <= 3; the optimizer's lifted problems
// (epigraph / Chebyshev variable, KKT systems) stay within 6.
inline constexpr int kMaxAmbientDim = 3;
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v(i++) = value;
  return v;
}

inline Vec zeros(int dim) { return Vec::Zero(dim); }

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace nscbf
