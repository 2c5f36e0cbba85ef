#pragma once

#include <cstdint>
#include <vector>

#include "nscbf/barrier.hpp"
#include "nscbf/dynamics.hpp"

namespace nscbf {

/// One affine piece u -> <coeff, u> + constant of g(x, .), generated by a
/// vertex zeta of the Clarke gradient: coeff = B_in' zeta,
/// constant = zeta' A x + support_W(zeta).
struct AffineRowInU {
  Vec coeff;
  double constant = 0.0;
  int source_index = -1;  // barrier piece whose gradient is this vertex

  double value(const Vec& u) const { return coeff.dot(u) + constant; }
};

/// Outer band {x : 0 <= B(x) <= rho} around the boundary of K.
struct ShellSpec {
  double rho = 0.2;

  bool contains(const PiecewiseMinBarrier& barrier, const Vec& x) const;
};

/// gamma(x) = constant, or c * max(0, -B(x)).
struct Gamma {
  enum class Kind { kConstant, kBarrierScaled };
  Kind kind = Kind::kConstant;
  double c = 0.0;

  double operator()(const PiecewiseMinBarrier& barrier, const Vec& x) const;
};

std::vector<AffineRowInU> g_affine_rows(const PiecewiseMinBarrier& barrier,
                                        const LinearInclusion& sys, const Vec& x);

/// g(x,u) = sup over zeta in the Clarke gradient and eta in F(x,u) of
/// <zeta, eta>.
double g_eval(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys, const Vec& x,
              const Vec& u);

/// Inner approximation of g by random simplex weights over the active pieces
/// and random points of W. With include_vertices every (e_i, vertex of W)
/// pair is also evaluated, which attains the supremum.
double g_bruteforce_oracle(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                           const Vec& x, const Vec& u, int n_samples, std::uint64_t seed,
                           bool include_vertices = true);

/// min over u in the box of g(x,u), solved as an epigraph LP.
double min_g_over_box(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                      const Box& input_box, const Vec& x);

enum class D0Variant { kOpen, kClosed };

/// u in D_gamma(x): u in the box and g(x,u) + gamma < 0 (<= 0 for the closed
/// variant).
bool d0_membership(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                   const Box& input_box, const Vec& x, const Vec& u, double gamma_value,
                   D0Variant variant = D0Variant::kOpen);

}  // namespace nscbf
