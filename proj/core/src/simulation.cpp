#include "nscbf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "nscbf/safety.hpp"

namespace nscbf {
namespace {

std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

const char* to_string(Scheme scheme) { return scheme == Scheme::kRk4 ? "rk4" : "euler"; }

const char* to_string(DisturbancePolicy::Kind kind) {
  switch (kind) {
    case DisturbancePolicy::Kind::kNone: return "none";
    case DisturbancePolicy::Kind::kFixedVertex: return "fixed_vertex";
    case DisturbancePolicy::Kind::kRandomPiecewiseConstant: return "random_piecewise_constant";
    case DisturbancePolicy::Kind::kAdversarial: return "adversarial";
  }
  return "unknown";
}

const char* to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::kCompleted: return "completed";
    case TrajectoryStatus::kControllerInfeasible: return "controller_infeasible";
    case TrajectoryStatus::kLeftStateConstraint: return "left_state_constraint";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("integrator: dt must be > 0");
  if (!(horizon >= dt) || !std::isfinite(horizon)) {
    throw DomainError("integrator: horizon must be finite and >= dt");
  }
}

long long IntegratorConfig::steps() const { return std::llround(horizon / dt); }

DisturbanceSelector::DisturbanceSelector(const LinearInclusion& sys, DisturbancePolicy policy)
    : sys_(&sys), policy_(policy), rng_(policy.seed) {
  const ConvexPolytope& w = sys.disturbance();
  switch (policy_.kind) {
    case DisturbancePolicy::Kind::kNone:
      if (!w.contains(Vec::Zero(sys.state_dim()))) {
        throw DomainError("disturbance policy none requires 0 in W");
      }
      break;
    case DisturbancePolicy::Kind::kFixedVertex:
      if (policy_.vertex_index < 0 ||
          policy_.vertex_index >= static_cast<int>(w.vertices().size())) {
        throw DomainError("disturbance policy: vertex index out of range");
      }
      break;
    default:
      break;
  }
}

Vec DisturbanceSelector::select(const PiecewiseMinBarrier& barrier, const Vec& x) {
  const std::vector<Vec>& verts = sys_->disturbance().vertices();
  switch (policy_.kind) {
    case DisturbancePolicy::Kind::kNone:
      return Vec::Zero(sys_->state_dim());
    case DisturbancePolicy::Kind::kFixedVertex:
      return verts[policy_.vertex_index];
    case DisturbancePolicy::Kind::kRandomPiecewiseConstant: {
      // uniform simplex weights over the vertices of W
      std::exponential_distribution<double> expo(1.0);
      std::vector<double> weights(verts.size());
      double total = 0.0;
      for (double& wt : weights) total += (wt = expo(rng_));
      Vec w = Vec::Zero(sys_->state_dim());
      for (std::size_t k = 0; k < verts.size(); ++k) w += (weights[k] / total) * verts[k];
      return w;
    }
    case DisturbancePolicy::Kind::kAdversarial: {
      const std::vector<int> active = barrier.exact_active(x);
      return worst_case_disturbance(*sys_, barrier.pieces()[active.front()].gradient);
    }
  }
  return Vec::Zero(sys_->state_dim());
}

Vec step(const SafeController& ctrl, const Vec& x, const Vec& w, double dt, Scheme scheme) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be > 0");
  const LinearInclusion& sys = ctrl.system();
  auto f = [&](const Vec& s) -> Vec { return sys.flow(s, kappa_star(ctrl, s), w); };
  if (scheme == Scheme::kEuler) return x + dt * f(x);
  const Vec k1 = f(x);
  const Vec k2 = f(x + 0.5 * dt * k1);
  const Vec k3 = f(x + 0.5 * dt * k2);
  const Vec k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double Trajectory::max_barrier() const {
  double out = -std::numeric_limits<double>::infinity();
  for (double b : barrier_values) out = std::max(out, b);
  return out;
}

Trajectory simulate(const SafeController& ctrl, const DisturbancePolicy& policy, const Vec& x0,
                    const IntegratorConfig& cfg, const SimulationOptions& options) {
  cfg.validate();
  const LinearInclusion& sys = ctrl.system();
  const PiecewiseMinBarrier& barrier = ctrl.barrier();
  if (x0.size() != sys.state_dim()) throw DimensionError("simulate: x0 has the wrong dimension");
  DisturbanceSelector selector(sys, policy);

  const long long n_steps = cfg.steps();
  Trajectory traj;
  traj.started_unsafe = barrier.eval(x0) > 0.0;
  const std::size_t reserve = static_cast<std::size_t>(n_steps) + 1;
  traj.times.reserve(reserve);
  traj.states.reserve(reserve);
  traj.inputs.reserve(reserve);
  traj.barrier_values.reserve(reserve);
  traj.g_values.reserve(reserve);
  traj.relax_values.reserve(reserve);
  traj.active_sets.reserve(reserve);
  traj.disturbances.reserve(reserve);

  auto stop = [&](TrajectoryStatus status, double t, std::string message) {
    traj.status = status;
    traj.status_time = t;
    traj.message = std::move(message);
  };

  Vec x = x0;
  for (long long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (!x.allFinite() || (options.state_box && !options.state_box->contains(x, 1e-12))) {
      stop(TrajectoryStatus::kLeftStateConstraint, t, "state left the state constraint set");
      return traj;
    }
    std::optional<ControlEvaluation> eval;
    try {
      eval.emplace(evaluate(ctrl, x));
    } catch (const InfeasibleConstraintsError& e) {
      stop(TrajectoryStatus::kControllerInfeasible, t, e.what());
      return traj;
    }
    const Vec w = selector.select(barrier, x);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.inputs.push_back(eval->u);
    traj.barrier_values.push_back(eval->barrier_value);
    traj.g_values.push_back(g_eval(barrier, sys, x, eval->u));
    traj.relax_values.push_back(eval->relax);
    traj.active_sets.push_back(eval->exact_active);
    traj.disturbances.push_back(w);
    if (options.unsafe_set && options.unsafe_set->contains(x)) ++traj.unsafe_hits;
    if (k == n_steps) break;

    Vec next;
    try {
      next = step(ctrl, x, w, cfg.dt, cfg.scheme);
    } catch (const InfeasibleConstraintsError& e) {
      stop(TrajectoryStatus::kControllerInfeasible, t, e.what());
      return traj;
    }
    const double travel = (next - x).norm();
    traj.max_step_travel = std::max(traj.max_step_travel, travel);
    if (travel >= 0.5 * options.shell_rho) traj.travel_warning = true;
    x = next;
  }
  stop(TrajectoryStatus::kCompleted, traj.times.back(), "horizon reached (horizon-truncated)");
  return traj;
}

BatchSummary summarize(const std::vector<Trajectory>& trajectories) {
  BatchSummary s;
  s.count = static_cast<int>(trajectories.size());
  s.max_barrier = -std::numeric_limits<double>::infinity();
  s.min_shell_margin = std::numeric_limits<double>::infinity();
  for (const Trajectory& t : trajectories) {
    if (t.status == TrajectoryStatus::kCompleted) ++s.completed;
    if (!t.barrier_values.empty()) {
      s.max_barrier = std::max(s.max_barrier, t.max_barrier());
      s.min_shell_margin = std::min(s.min_shell_margin, -t.max_barrier());
    }
    s.unsafe_hits += t.unsafe_hits;
    s.travel_warning = s.travel_warning || t.travel_warning;
  }
  return s;
}

BatchResult batch_simulate(const SafeController& ctrl, const DisturbancePolicy& policy,
                           const std::vector<Vec>& initial_states, const IntegratorConfig& cfg,
                           const SimulationOptions& options, int threads) {
  if (initial_states.empty()) throw DomainError("batch_simulate: need at least one start");
  cfg.validate();
  const std::size_t n = initial_states.size();
  BatchResult out;
  out.trajectories.resize(n);

  auto run_one = [&](std::size_t k) {
    DisturbancePolicy p = policy;
    if (p.kind == DisturbancePolicy::Kind::kRandomPiecewiseConstant) {
      p.seed = trajectory_seed(policy.seed, k);
    }
    out.trajectories[k] = simulate(ctrl, p, initial_states[k], cfg, options);
  };

  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) run_one(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < n; k += workers) run_one(k);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  out.summary = summarize(out.trajectories);
  return out;
}

std::vector<Vec> ring_states(const Vec& center, double radius, int count, double phase) {
  if (center.size() != 2) throw DimensionError("ring_states: center must be planar");
  if (count < 1) throw DomainError("ring_states: count must be >= 1");
  if (!(radius > 0.0)) throw DomainError("ring_states: radius must be > 0");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / count;
    out.push_back(center + radius * make_vec({std::cos(t), std::sin(t)}));
  }
  return out;
}

std::vector<Vec> grid_states(const Box& box, int per_axis) {
  if (per_axis < 2) throw DomainError("grid_states: per_axis must be >= 2");
  const int n = box.dim();
  std::vector<Vec> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(idx[i]) / (per_axis - 1);
      x(i) = box.lower()(i) + s * (box.upper()(i) - box.lower()(i));
    }
    out.push_back(x);
    int i = n - 1;
    while (i >= 0 && ++idx[i] == per_axis) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

}  // namespace nscbf
