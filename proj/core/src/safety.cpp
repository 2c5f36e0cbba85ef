#include "nscbf/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nscbf/errors.hpp"
#include "nscbf/optimizer.hpp"

namespace nscbf {
namespace {

void check_dims(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys, const Vec& x) {
  if (barrier.dim() != sys.state_dim() || x.size() != sys.state_dim()) {
    throw DimensionError("barrier, system and state dimensions disagree");
  }
}

// Dirichlet(1,...,1) weights.
std::vector<double> simplex_weights(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (double& v : w) total += (v = expo(rng));
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

bool ShellSpec::contains(const PiecewiseMinBarrier& barrier, const Vec& x) const {
  const double b = barrier.eval(x);
  return b >= 0.0 && b <= rho;
}

double Gamma::operator()(const PiecewiseMinBarrier& barrier, const Vec& x) const {
  if (kind == Kind::kConstant) return c;
  return c * std::max(0.0, -barrier.eval(x));
}

std::vector<AffineRowInU> g_affine_rows(const PiecewiseMinBarrier& barrier,
                                        const LinearInclusion& sys, const Vec& x) {
  check_dims(barrier, sys, x);
  const std::vector<int> active = barrier.exact_active(x);
  const ConvexPolytope clarke = barrier.clarke_gradient(x);
  const Vec ax = sys.a_mat() * x;
  std::vector<AffineRowInU> rows;
  rows.reserve(clarke.vertices().size());
  for (const Vec& zeta : clarke.vertices()) {
    int source = active.front();
    for (int i : active) {
      if ((barrier.pieces()[i].gradient - zeta).cwiseAbs().maxCoeff() <= kHullTol) {
        source = i;
        break;
      }
    }
    rows.push_back({sys.b_mat().transpose() * zeta,
                    zeta.dot(ax) + support_function(sys.disturbance(), zeta), source});
  }
  return rows;
}

double g_eval(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys, const Vec& x,
              const Vec& u) {
  if (u.size() != sys.input_dim()) throw DimensionError("g_eval: input dimension mismatch");
  double g = -std::numeric_limits<double>::infinity();
  for (const AffineRowInU& row : g_affine_rows(barrier, sys, x)) g = std::max(g, row.value(u));
  return g;
}

double g_bruteforce_oracle(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                           const Vec& x, const Vec& u, int n_samples, std::uint64_t seed,
                           bool include_vertices) {
  if (n_samples < 1) throw DomainError("g_bruteforce_oracle: n_samples must be >= 1");
  check_dims(barrier, sys, x);
  // Active pieces recomputed from raw piece values.
  const std::vector<AffinePiece>& pieces = barrier.pieces();
  double b = std::numeric_limits<double>::infinity();
  for (const AffinePiece& p : pieces) b = std::min(b, p.gradient.dot(x) + p.offset);
  std::vector<Vec> grads;
  for (const AffinePiece& p : pieces) {
    if (p.gradient.dot(x) + p.offset <= b + barrier.tie_tol()) grads.push_back(p.gradient);
  }
  const std::vector<Vec>& w_vertices = sys.disturbance().vertices();
  const Vec drift = sys.a_mat() * x + sys.b_mat() * u;

  std::mt19937_64 rng(seed);
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    const std::vector<double> theta = simplex_weights(rng, grads.size());
    const std::vector<double> mu = simplex_weights(rng, w_vertices.size());
    Vec zeta = Vec::Zero(x.size());
    for (std::size_t i = 0; i < grads.size(); ++i) zeta += theta[i] * grads[i];
    Vec w = Vec::Zero(x.size());
    for (std::size_t j = 0; j < w_vertices.size(); ++j) w += mu[j] * w_vertices[j];
    best = std::max(best, zeta.dot(drift + w));
  }
  if (include_vertices) {
    for (const Vec& zeta : grads) {
      for (const Vec& w : w_vertices) best = std::max(best, zeta.dot(drift + w));
    }
  }
  return best;
}

double min_g_over_box(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                      const Box& input_box, const Vec& x) {
  const int m = sys.input_dim();
  if (input_box.dim() != m) throw DimensionError("min_g_over_box: box dimension mismatch");
  const std::vector<AffineRowInU> rows = g_affine_rows(barrier, sys, x);

  // Epigraph variable t with <coeff,u> + c <= t; t is boxed by the range of
  // g over the input box.
  double bound = 1.0;
  for (const AffineRowInU& row : rows) {
    bound = std::max(bound, std::abs(row.constant) +
                                row.coeff.cwiseAbs().dot(input_box.lower().cwiseAbs().cwiseMax(
                                    input_box.upper().cwiseAbs())));
  }
  Vec lower(m + 1), upper(m + 1);
  lower.head(m) = input_box.lower();
  upper.head(m) = input_box.upper();
  lower(m) = -2.0 * bound;
  upper(m) = 2.0 * bound;
  ConstraintSystem epigraph(Box(lower, upper));
  for (const AffineRowInU& row : rows) {
    Vec a(m + 1);
    a.head(m) = row.coeff;
    a(m) = -1.0;
    epigraph.add_row(a, -row.constant);
  }
  Vec cost = Vec::Zero(m + 1);
  cost(m) = 1.0;
  const LpSolution lp = solve_lp(cost, epigraph);
  if (lp.status != SolveStatus::kOptimal) throw InfeasibleError("min_g_over_box: LP failed");
  return lp.value;
}

bool d0_membership(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                   const Box& input_box, const Vec& x, const Vec& u, double gamma_value,
                   D0Variant variant) {
  if (!input_box.contains(u)) return false;
  const double value = g_eval(barrier, sys, x, u) + gamma_value;
  return variant == D0Variant::kOpen ? value < 0.0 : value <= 0.0;
}

}  // namespace nscbf
