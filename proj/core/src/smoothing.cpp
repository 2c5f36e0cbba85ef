#include "nscbf/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nscbf/errors.hpp"

namespace nscbf {
namespace {

constexpr double kDropRowNorm = 1e-9;

}  // namespace

double relaxation(const PiecewiseMinBarrier& barrier, const SmoothingParams& params, const Vec& x) {
  return std::max(0.0, -params.m_gain * barrier.eval(x));
}

ConstraintSystem smoothed_constraints(const PiecewiseMinBarrier& barrier,
                                      const LinearInclusion& sys, const SmoothingParams& params,
                                      const Vec& x) {
  if (barrier.dim() != sys.state_dim() || x.size() != sys.state_dim()) {
    throw DimensionError("smoothed_constraints: state dimension mismatch");
  }
  if (params.input_box.dim() != sys.input_dim()) {
    throw DimensionError("smoothed_constraints: input box dimension mismatch");
  }
  if (!(params.m_gain > 0.0)) throw DomainError("smoothed_constraints: M must be > 0");

  const std::vector<AffinePiece>& pieces = barrier.pieces();
  const double b = barrier.eval(x);
  const double relax = std::max(0.0, -params.m_gain * b);
  const Vec ax = sys.a_mat() * x;

  ConstraintSystem out(params.input_box);
  auto add = [&](const Vec& v) {
    out.add_row(sys.b_mat().transpose() * v,
                -v.dot(ax) - support_function(sys.disturbance(), v) + relax);
  };

  std::vector<int> exact;
  std::vector<int> near_only;
  if (params.blend) {
    const ActiveSets sets = barrier.active_set(x, params.alpha);
    exact = sets.exact;
    for (int j : sets.near) {
      if (std::find(exact.begin(), exact.end(), j) == exact.end()) near_only.push_back(j);
    }
  } else {
    exact = barrier.exact_active(x);
  }

  for (int i : exact) add(pieces[i].gradient);
  for (int i : exact) {
    for (int j : near_only) {
      const double phi = std::numbers::pi * std::abs(b - pieces[j].value(x)) / (2.0 * params.alpha);
      const Vec v = std::sin(phi) * pieces[i].gradient + std::cos(phi) * pieces[j].gradient;
      if (v.norm() < kDropRowNorm) continue;
      add(v);
    }
  }
  return out;
}

ConvexPolytope blend_maps_lemma5(const PolytopeMap& f1, const PolytopeMap& f2,
                                 const BlendDomain& domain, const Vec& x) {
  if (!(domain.eps1 > 0.0) || !(domain.eps_outer > domain.eps1)) {
    throw DomainError("blend_maps_lemma5: need 0 < eps1 < eps_outer");
  }
  const double dist = distance_to_boundary(x, domain.barrier.zero_level_set(domain.window));
  const bool in_k = domain.barrier.eval(x) <= 0.0;
  if (!in_k) {
    if (dist > domain.eps_outer) {
      throw DomainError("blend_maps_lemma5: x lies outside K and outside the neighborhood of dK");
    }
    return f2(x);
  }
  if (dist >= domain.eps1) return f1(x);
  const double lambda = dist / domain.eps1;
  return minkowski_sum(scale_polytope(f1(x), lambda), scale_polytope(f2(x), 1.0 - lambda));
}

}  // namespace nscbf
