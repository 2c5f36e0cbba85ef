#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nscbf/controller.hpp"
#include "nscbf/safety.hpp"

namespace nscbf {

struct Witness {
  Vec point;
  double value = 0.0;
};

/// Outcome of one sampled check. pass == (worst_case <= threshold) for every
/// probe; each probe documents what worst_case measures.
struct ProbeReport {
  std::string name;
  int samples = 0;
  double worst_case = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<Witness> witnesses;  // capped at kMaxWitnesses
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  static constexpr std::size_t kMaxWitnesses = 16;
  void add_witness(const Vec& point, double value);
  void finalize() { pass = worst_case <= threshold; }
};

using StateSampler = std::function<Vec(std::mt19937_64&)>;
using ConstraintMap = std::function<ConstraintSystem(const Vec&)>;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double unit_uniform(std::mt19937_64& rng);

StateSampler uniform_box_sampler(const Box& box);

/// Uniform on {x in box : accept(x)}; throws DomainError after max_tries
/// consecutive rejections.
StateSampler rejection_sampler(const Box& box, std::function<bool(const Vec&)> accept,
                               int max_tries = 100000);

/// n states drawn uniformly from the shell {0 <= B <= rho} within window.
std::vector<Vec> sample_shell(const PiecewiseMinBarrier& barrier, const ShellSpec& shell,
                              const Box& window, int n, std::uint64_t seed);

/// worst_case = max over shell samples of min_{u in box} g(x,u); threshold 0.
ProbeReport check_cbf_shell(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                            const Box& input_box, const ShellSpec& shell, const Box& window,
                            int n_samples, std::uint64_t seed);

/// worst_case = number of sign violations; threshold 0.
ProbeReport check_candidate_signs(const PiecewiseMinBarrier& barrier,
                                  const StateSampler& unsafe_sampler,
                                  const StateSampler& init_sampler, int n, std::uint64_t seed);

struct ContinuityOptions {
  double slack = 1.1;        // allowed growth between consecutive deltas
  double final_factor = 10;  // smallest-delta jump <= final_factor * delta * L
  double floor = 1e-12;      // absolute tolerance on every comparison
};

/// For every grid state and delta, the worst jump |kappa(x + delta v) - kappa(x)|
/// over 8 unit directions v. worst_case = max over states of the largest
/// ratio (observed jump) / (allowed jump); threshold 1. Infeasible states are
/// excluded and listed in the notes.
ProbeReport probe_continuity_kappa(const SafeController& ctrl, const std::vector<Vec>& grid,
                                   std::vector<double> deltas, const ContinuityOptions& options = {});

/// Unit directions used by the continuity probe (8 of them for n = 2).
std::vector<Vec> probe_directions(int dim);

/// worst_case = max g(x,u) over shell samples x and u among the vertices and
/// the Chebyshev center of constraints(x); threshold 1e-9.
ProbeReport check_subset_safe(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                              const ConstraintMap& constraints, const ShellSpec& shell,
                              const Box& window, int n, std::uint64_t seed);
ProbeReport check_subset_safe(const SafeController& ctrl, const ShellSpec& shell,
                              const Box& window, int n, std::uint64_t seed);

/// worst_case = -(min Chebyshev margin over shell samples); threshold -1e-12,
/// so passing means every sampled constraint set has nonempty interior.
ProbeReport check_strict_feasibility(const SafeController& ctrl, const ShellSpec& shell,
                                     const Box& window, int n, std::uint64_t seed);

/// worst_case = max g(x, kappa*(x)) over shell samples; threshold 1e-9.
ProbeReport check_kappa_shell_safety(const SafeController& ctrl, const ShellSpec& shell,
                                     const Box& window, int n, std::uint64_t seed);

/// worst_case = max |u_start - u_default| over states and starts at every
/// feasible vertex; threshold 1e-8.
ProbeReport check_qp_uniqueness(const SafeController& ctrl, const std::vector<Vec>& states);

struct BlendProbeOptions {
  Box window;             // where pair base points are drawn
  double pair_step = 1e-2;  // |x - y| for random pairs
  double slack = 1.1;     // applied to the interior Lipschitz estimate
  double tol = 1e-9;
};

/// Lemma-5 style check of G = blend_maps_lemma5(f1, f2, domain, .):
/// G equals F2 on the seam samples, and seam-straddling pairs obey
/// d_H(G(x), G(y)) <= L |x - y| + tol with L from same-region pairs.
/// worst_case = largest excess over those bounds; threshold 0.
ProbeReport blend_continuity_report(const PolytopeMap& f1, const PolytopeMap& f2,
                                    const BlendDomain& domain,
                                    const std::vector<Vec>& seam_samples, int n,
                                    std::uint64_t seed, const BlendProbeOptions& options);

}  // namespace nscbf
