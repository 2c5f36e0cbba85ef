#pragma once

#include <functional>

#include "nscbf/barrier.hpp"
#include "nscbf/constraints.hpp"
#include "nscbf/dynamics.hpp"

namespace nscbf {

struct SmoothingParams {
  double alpha = 0.01;   // near-active window
  double m_gain = 100.0;  // relaxation gain M
  Box input_box = Box::symmetric(2, 5.0);
  // false: raw exact-active rows only (the unsmoothed baseline).
  bool blend = true;
};

/// max{0, -M B(x)}, added to every row's right-hand side.
double relaxation(const PiecewiseMinBarrier& barrier, const SmoothingParams& params, const Vec& x);

/// Continuous constraint map: one row per exact-active piece
///   (B_in' grad_i) u <= -grad_i' A x - support_W(grad_i) + relax
/// and one blended row per pair (i exact, j near-but-not-exact) with
///   v_ij = sin(phi_j) grad_i + cos(phi_j) grad_j,
///   phi_j = pi |B(x) - B_j(x)| / (2 alpha).
ConstraintSystem smoothed_constraints(const PiecewiseMinBarrier& barrier,
                                      const LinearInclusion& sys, const SmoothingParams& params,
                                      const Vec& x);

using PolytopeMap = std::function<ConvexPolytope(const Vec&)>;

/// Where the two maps of a Minkowski blend live: K = {B <= 0} of the barrier,
/// F2 defined up to eps_outer outside K, blend zone of width eps1 inside K.
struct BlendDomain {
  PiecewiseMinBarrier barrier;
  Box window;  // bounding window for the zero level set
  double eps1 = 0.1;
  double eps_outer = 0.2;
};

/// G(x) = F1(x) deep in K, F2(x) outside K, and
/// lambda F1(x) + (1 - lambda) F2(x) with lambda = d(x, dK) / eps1 in between.
ConvexPolytope blend_maps_lemma5(const PolytopeMap& f1, const PolytopeMap& f2,
                                 const BlendDomain& domain, const Vec& x);

}  // namespace nscbf
