#include "nscbf/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nscbf/errors.hpp"

namespace nscbf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec random_unit(std::mt19937_64& rng, int dim) {
  Vec v(dim);
  do {
    for (int i = 0; i < dim; ++i) {
      // Box-Muller; 1 - u keeps the log argument in (0, 1]
      const double r = std::sqrt(-2.0 * std::log(1.0 - unit_uniform(rng)));
      v(i) = r * std::cos(2.0 * std::numbers::pi * unit_uniform(rng));
    }
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << "]";
  return os.str();
}

ProbeReport make_report(std::string name, int samples, double worst_case, double threshold) {
  ProbeReport r;
  r.name = std::move(name);
  r.samples = samples;
  r.worst_case = worst_case;
  r.threshold = threshold;
  return r;
}

void require_samples(int n, const char* probe) {
  if (n < 1) throw DomainError(std::string(probe) + ": at least one sample is required");
}

}  // namespace

void ProbeReport::add_witness(const Vec& point, double value) {
  if (witnesses.size() < kMaxWitnesses) witnesses.push_back({point, value});
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

StateSampler uniform_box_sampler(const Box& box) {
  return [box](std::mt19937_64& rng) {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) {
      x(i) = box.lower()(i) + unit_uniform(rng) * (box.upper()(i) - box.lower()(i));
    }
    return x;
  };
}

StateSampler rejection_sampler(const Box& box, std::function<bool(const Vec&)> accept,
                               int max_tries) {
  StateSampler base = uniform_box_sampler(box);
  return [base, accept = std::move(accept), max_tries](std::mt19937_64& rng) {
    for (int t = 0; t < max_tries; ++t) {
      Vec x = base(rng);
      if (accept(x)) return x;
    }
    throw DomainError("rejection_sampler: no accepted sample; check the bounding box");
  };
}

std::vector<Vec> sample_shell(const PiecewiseMinBarrier& barrier, const ShellSpec& shell,
                              const Box& window, int n, std::uint64_t seed) {
  require_samples(n, "sample_shell");
  const StateSampler sampler = rejection_sampler(
      window, [&](const Vec& x) { return shell.contains(barrier, x); });
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(sampler(rng));
  return out;
}

ProbeReport check_cbf_shell(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                            const Box& input_box, const ShellSpec& shell, const Box& window,
                            int n_samples, std::uint64_t seed) {
  require_samples(n_samples, "check_cbf_shell");
  ProbeReport report = make_report("cbf_shell", n_samples, -kInf, 0.0);
  for (const Vec& x : sample_shell(barrier, shell, window, n_samples, seed)) {
    const double mg = min_g_over_box(barrier, sys, input_box, x);
    report.worst_case = std::max(report.worst_case, mg);
    if (mg > report.threshold) report.add_witness(x, mg);
  }
  report.metrics.push_back({"strict_margin", -report.worst_case});
  report.metrics.push_back({"rho", shell.rho});
  report.notes.push_back("worst_case = max over shell samples of min over the input box of g");
  report.finalize();
  return report;
}

ProbeReport check_candidate_signs(const PiecewiseMinBarrier& barrier,
                                  const StateSampler& unsafe_sampler,
                                  const StateSampler& init_sampler, int n, std::uint64_t seed) {
  require_samples(n, "check_candidate_signs");
  std::mt19937_64 rng(seed);
  std::vector<Vec> unsafe, init;
  unsafe.reserve(static_cast<std::size_t>(n));
  init.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) unsafe.push_back(unsafe_sampler(rng));
  for (int k = 0; k < n; ++k) init.push_back(init_sampler(rng));
  const CandidateReport cand = is_candidate_at(barrier, unsafe, init);

  ProbeReport report = make_report("candidate_signs", 2 * n, static_cast<double>(cand.violations.size()), 0.0);
  for (const CandidateViolation& v : cand.violations) report.add_witness(v.point, v.value);
  double min_unsafe = kInf, max_init = -kInf;
  for (const Vec& x : unsafe) min_unsafe = std::min(min_unsafe, barrier.eval(x));
  for (const Vec& x : init) max_init = std::max(max_init, barrier.eval(x));
  report.metrics.push_back({"min_B_unsafe", min_unsafe});
  report.metrics.push_back({"max_B_initial", max_init});
  report.notes.push_back("worst_case = number of samples with the wrong sign of B");
  report.finalize();
  return report;
}

std::vector<Vec> probe_directions(int dim) {
  if (dim == 2) {
    std::vector<Vec> out;
    for (int k = 0; k < 8; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 8.0;
      out.push_back(make_vec({std::cos(t), std::sin(t)}));
    }
    return out;
  }
  // +-e_i, then normalized sign vectors, up to 8 directions
  std::vector<Vec> out;
  for (int i = 0; i < dim && out.size() < 8; ++i) {
    for (double s : {1.0, -1.0}) {
      Vec v = Vec::Zero(dim);
      v(i) = s;
      out.push_back(v);
    }
  }
  for (int mask = 0; mask < (1 << dim) && out.size() < 8 && dim > 1; ++mask) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = (mask >> i) & 1 ? -1.0 : 1.0;
    out.push_back(v / std::sqrt(static_cast<double>(dim)));
  }
  return out;
}

ProbeReport probe_continuity_kappa(const SafeController& ctrl, const std::vector<Vec>& grid,
                                   std::vector<double> deltas, const ContinuityOptions& options) {
  if (grid.empty()) throw DomainError("probe_continuity_kappa: empty grid");
  if (deltas.size() < 2) throw DomainError("probe_continuity_kappa: need at least two deltas");
  for (double d : deltas) {
    if (!(d > 0.0)) throw DomainError("probe_continuity_kappa: deltas must be > 0");
  }
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  const std::vector<Vec> dirs = probe_directions(ctrl.barrier().dim());

  ProbeReport report = make_report("continuity_kappa", 0, 0.0, 1.0);
  std::vector<double> max_jump(deltas.size(), 0.0);
  int excluded = 0;
  for (const Vec& x : grid) {
    Vec u0;
    try {
      u0 = kappa_star(ctrl, x);
    } catch (const InfeasibleConstraintsError&) {
      ++excluded;
      report.notes.push_back("excluded infeasible grid state " + format_point(x));
      continue;
    }
    ++report.samples;
    std::vector<double> jumps(deltas.size(), 0.0);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      for (const Vec& v : dirs) {
        try {
          jumps[k] = std::max(jumps[k], (kappa_star(ctrl, x + deltas[k] * v) - u0).norm());
        } catch (const InfeasibleConstraintsError&) {
          // neighbor outside the feasible region; direction skipped
        }
      }
      max_jump[k] = std::max(max_jump[k], jumps[k]);
    }
    const double lipschitz = jumps.front() / deltas.front();
    double ratio = 0.0;
    for (std::size_t k = 1; k < deltas.size(); ++k) {
      ratio = std::max(ratio, jumps[k] / (options.slack * jumps[k - 1] + options.floor));
    }
    ratio = std::max(ratio, jumps.back() / (options.final_factor * deltas.back() * lipschitz +
                                            options.floor));
    report.worst_case = std::max(report.worst_case, ratio);
    if (ratio > report.threshold) report.add_witness(x, jumps.back());
  }
  if (report.samples == 0) {
    report.worst_case = kInf;
    report.notes.push_back("no feasible grid state");
  }
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    std::ostringstream key;
    key << "max_jump@" << deltas[k];
    report.metrics.push_back({key.str(), max_jump[k]});
  }
  report.metrics.push_back({"excluded", static_cast<double>(excluded)});
  report.notes.push_back(
      "worst_case = max over states of observed/allowed jump; allowed: growth <= 1.1x between "
      "consecutive deltas, smallest-delta jump <= 10 * delta * L with L the largest-delta ratio");
  report.finalize();
  return report;
}

ProbeReport check_subset_safe(const PiecewiseMinBarrier& barrier, const LinearInclusion& sys,
                              const ConstraintMap& constraints, const ShellSpec& shell,
                              const Box& window, int n, std::uint64_t seed) {
  require_samples(n, "check_subset_safe");
  ProbeReport report = make_report("subset_safe", n, -kInf, 1e-9);
  int candidates = 0;
  for (const Vec& x : sample_shell(barrier, shell, window, n, seed)) {
    const ConstraintSystem cons = constraints(x);
    std::vector<Vec> us = feasible_vertices(cons);
    if (us.empty()) {
      report.worst_case = kInf;
      report.add_witness(x, kInf);
      continue;
    }
    try {
      us.push_back(strict_feasibility(cons).center);
    } catch (const InfeasibleError&) {
    }
    double worst = -kInf;
    for (const Vec& u : us) worst = std::max(worst, g_eval(barrier, sys, x, u));
    candidates += static_cast<int>(us.size());
    report.worst_case = std::max(report.worst_case, worst);
    if (worst > report.threshold) report.add_witness(x, worst);
  }
  report.metrics.push_back({"inputs_checked", static_cast<double>(candidates)});
  report.notes.push_back("worst_case = max g(x,u) over feasible vertices and Chebyshev centers");
  report.finalize();
  return report;
}

ProbeReport check_subset_safe(const SafeController& ctrl, const ShellSpec& shell,
                              const Box& window, int n, std::uint64_t seed) {
  ConstraintMap map = [&ctrl](const Vec& x) {
    return smoothed_constraints(ctrl.barrier(), ctrl.system(), ctrl.smoothing(), x);
  };
  return check_subset_safe(ctrl.barrier(), ctrl.system(), map, shell, window, n, seed);
}

ProbeReport check_strict_feasibility(const SafeController& ctrl, const ShellSpec& shell,
                                     const Box& window, int n, std::uint64_t seed) {
  require_samples(n, "check_strict_feasibility");
  ProbeReport report = make_report("strict_feasibility", n, -kInf, -1e-12);
  for (const Vec& x : sample_shell(ctrl.barrier(), shell, window, n, seed)) {
    const ConstraintSystem cons =
        smoothed_constraints(ctrl.barrier(), ctrl.system(), ctrl.smoothing(), x);
    double margin = -kInf;
    try {
      margin = strict_feasibility(cons).margin;
    } catch (const InfeasibleError&) {
    }
    report.worst_case = std::max(report.worst_case, -margin);
    if (-margin > report.threshold) report.add_witness(x, margin);
  }
  report.metrics.push_back({"min_margin", -report.worst_case});
  report.notes.push_back("worst_case = -min Chebyshev radius of the constraint set");
  report.finalize();
  return report;
}

ProbeReport check_kappa_shell_safety(const SafeController& ctrl, const ShellSpec& shell,
                                     const Box& window, int n, std::uint64_t seed) {
  require_samples(n, "check_kappa_shell_safety");
  ProbeReport report = make_report("kappa_shell_safety", n, -kInf, 1e-9);
  for (const Vec& x : sample_shell(ctrl.barrier(), shell, window, n, seed)) {
    double g = kInf;
    try {
      g = g_eval(ctrl.barrier(), ctrl.system(), x, kappa_star(ctrl, x));
    } catch (const InfeasibleConstraintsError&) {
    }
    report.worst_case = std::max(report.worst_case, g);
    if (g > report.threshold) report.add_witness(x, g);
  }
  report.notes.push_back("worst_case = max g(x, kappa*(x)) over shell samples");
  report.finalize();
  return report;
}

ProbeReport check_qp_uniqueness(const SafeController& ctrl, const std::vector<Vec>& states) {
  if (states.empty()) throw DomainError("check_qp_uniqueness: no states");
  ProbeReport report = make_report("qp_uniqueness", 0, 0.0, 1e-8);
  const int m = ctrl.system().input_dim();
  for (const Vec& x : states) {
    const ConstraintSystem cons =
        smoothed_constraints(ctrl.barrier(), ctrl.system(), ctrl.smoothing(), x);
    Vec q = Vec::Zero(m);
    if (ctrl.cost().kind == CostKind::kNominalTracking) q = -nominal_input(ctrl, x);
    const QuadraticProgram qp(Mat::Identity(m, m), q, cons);
    const QpSolution base = solve_qp(qp);
    if (base.status != SolveStatus::kOptimal) {
      report.notes.push_back("excluded infeasible state " + format_point(x));
      continue;
    }
    ++report.samples;
    double worst = 0.0;
    for (const Vec& start : feasible_vertices(cons)) {
      const QpSolution alt = solve_qp(qp, QpOptions{start});
      const double diff =
          alt.status == SolveStatus::kOptimal ? (alt.u_star - base.u_star).norm() : kInf;
      worst = std::max(worst, diff);
    }
    report.worst_case = std::max(report.worst_case, worst);
    if (worst > report.threshold) report.add_witness(x, worst);
  }
  report.notes.push_back("worst_case = max change of u* when starting from each feasible vertex");
  report.finalize();
  return report;
}

ProbeReport blend_continuity_report(const PolytopeMap& f1, const PolytopeMap& f2,
                                    const BlendDomain& domain,
                                    const std::vector<Vec>& seam_samples, int n,
                                    std::uint64_t seed, const BlendProbeOptions& options) {
  require_samples(n, "blend_continuity_report");
  const MinAffineLevelSet level = domain.barrier.zero_level_set(domain.window);
  enum Region { kOutside, kBlend, kDeep, kUndefined };
  auto region = [&](const Vec& x) {
    const double dist = distance_to_boundary(x, level);
    if (domain.barrier.eval(x) > 0.0) return dist <= domain.eps_outer ? kOutside : kUndefined;
    return dist >= domain.eps1 ? kDeep : kBlend;
  };
  auto g = [&](const Vec& x) { return blend_maps_lemma5(f1, f2, domain, x); };

  ProbeReport report = make_report("blend_continuity", 0, -kInf, 0.0);
  double seam_worst = 0.0;
  for (const Vec& s : seam_samples) {
    const double d = hausdorff_distance(g(s), f2(s));
    seam_worst = std::max(seam_worst, d);
    report.worst_case = std::max(report.worst_case, d - options.tol);
    if (d > options.tol) report.add_witness(s, d);
  }

  struct Pair {
    Vec x, y;
    double dh, step;
  };
  std::vector<Pair> interior, straddling;
  std::mt19937_64 rng(seed);
  const StateSampler base = uniform_box_sampler(options.window);
  const int dim = options.window.dim();
  const int max_tries = 1000 * n;
  int tries = 0;
  while (static_cast<int>(interior.size() + straddling.size()) < n && tries++ < max_tries) {
    const Vec x = base(rng);
    const Vec y = x + options.pair_step * random_unit(rng, dim);
    const Region rx = region(x), ry = region(y);
    if (rx == kUndefined || ry == kUndefined) continue;
    Pair p{x, y, hausdorff_distance(g(x), g(y)), (x - y).norm()};
    (rx == ry ? interior : straddling).push_back(std::move(p));
  }
  // pairs across the seam itself
  for (const Vec& s : seam_samples) {
    const Vec v = random_unit(rng, dim);
    const Vec x = s + 0.5 * options.pair_step * v, y = s - 0.5 * options.pair_step * v;
    if (region(x) == kUndefined || region(y) == kUndefined) continue;
    straddling.push_back({x, y, hausdorff_distance(g(x), g(y)), (x - y).norm()});
  }

  double lipschitz = 0.0;
  for (const Pair& p : interior) lipschitz = std::max(lipschitz, p.dh / p.step);
  lipschitz *= options.slack;
  for (const Pair& p : straddling) {
    const double excess = p.dh - (lipschitz * p.step + options.tol);
    report.worst_case = std::max(report.worst_case, excess);
    if (excess > 0.0) report.add_witness(p.x, p.dh);
  }
  report.samples = static_cast<int>(seam_samples.size() + interior.size() + straddling.size());
  if (interior.empty()) {
    report.worst_case = kInf;
    report.notes.push_back("no same-region pairs; Lipschitz estimate unavailable");
  }
  report.metrics.push_back({"seam_max_hausdorff", seam_worst});
  report.metrics.push_back({"lipschitz_estimate", lipschitz});
  report.metrics.push_back({"interior_pairs", static_cast<double>(interior.size())});
  report.metrics.push_back({"straddling_pairs", static_cast<double>(straddling.size())});
  report.notes.push_back(
      "worst_case = max excess of seam distance over tol and of straddling-pair distance over "
      "L |dx| + tol, with L = 1.1 x the same-region estimate");
  report.finalize();
  return report;
}

}  // namespace nscbf
