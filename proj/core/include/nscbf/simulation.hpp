#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nscbf/controller.hpp"

namespace nscbf {

enum class Scheme { kRk4, kEuler };

const char* to_string(Scheme scheme);

struct IntegratorConfig {
  double dt = 1e-3;
  double horizon = 20.0;
  Scheme scheme = Scheme::kRk4;

  /// Throws DomainError unless 0 < dt <= horizon.
  void validate() const;
  /// Number of steps; horizon / dt rounded to the nearest integer.
  long long steps() const;
};

struct DisturbancePolicy {
  enum class Kind { kNone, kFixedVertex, kRandomPiecewiseConstant, kAdversarial };
  Kind kind = Kind::kNone;
  int vertex_index = 0;     // kFixedVertex
  std::uint64_t seed = 0;   // kRandomPiecewiseConstant

  static DisturbancePolicy none() { return {}; }
  static DisturbancePolicy fixed_vertex(int index) { return {Kind::kFixedVertex, index, 0}; }
  static DisturbancePolicy random_piecewise_constant(std::uint64_t seed) {
    return {Kind::kRandomPiecewiseConstant, 0, seed};
  }
  static DisturbancePolicy adversarial() { return {Kind::kAdversarial, 0, 0}; }
};

const char* to_string(DisturbancePolicy::Kind kind);

/// Picks w in W once per step according to a policy. Owns the random stream
/// of the random policy, so one selector serves one trajectory.
class DisturbanceSelector {
 public:
  DisturbanceSelector(const LinearInclusion& sys, DisturbancePolicy policy);

  /// kAdversarial maximizes <grad B_i, w> for the lowest-index active piece i.
  Vec select(const PiecewiseMinBarrier& barrier, const Vec& x);

 private:
  const LinearInclusion* sys_;
  DisturbancePolicy policy_;
  std::mt19937_64 rng_;
};

/// One step of x' = A x + B_in kappa*(x) + w with w held fixed. kappa* is
/// re-evaluated at every RK4 stage. Propagates InfeasibleConstraintsError.
Vec step(const SafeController& ctrl, const Vec& x, const Vec& w, double dt,
         Scheme scheme = Scheme::kRk4);

enum class TrajectoryStatus { kCompleted, kControllerInfeasible, kLeftStateConstraint };

const char* to_string(TrajectoryStatus status);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> inputs;
  std::vector<double> barrier_values;
  std::vector<double> g_values;
  std::vector<double> relax_values;
  std::vector<std::vector<int>> active_sets;
  std::vector<Vec> disturbances;

  TrajectoryStatus status = TrajectoryStatus::kCompleted;
  double status_time = 0.0;  // time of the failure, or the horizon when completed
  std::string message;
  bool started_unsafe = false;  // B(x0) > 0
  int unsafe_hits = 0;          // recorded states inside the unsafe set
  double max_step_travel = 0.0;
  bool travel_warning = false;  // some step moved at least rho / 2

  std::size_t size() const { return times.size(); }
  double max_barrier() const;
};

struct SimulationOptions {
  double shell_rho = 0.2;
  std::optional<Box> state_box;             // leaving it ends the run
  std::optional<HalfspaceSet> unsafe_set;   // counted in unsafe_hits
};

Trajectory simulate(const SafeController& ctrl, const DisturbancePolicy& policy, const Vec& x0,
                    const IntegratorConfig& cfg, const SimulationOptions& options = {});

struct BatchSummary {
  int count = 0;
  int completed = 0;
  double max_barrier = 0.0;
  // min over trajectories and recorded states of -B(x); positive means no
  // recorded state reached the boundary of K.
  double min_shell_margin = 0.0;
  int unsafe_hits = 0;
  bool travel_warning = false;
};

struct BatchResult {
  std::vector<Trajectory> trajectories;
  BatchSummary summary;
};

/// Runs independent trajectories in parallel, merged by index. The random
/// policy for trajectory k is seeded from (policy.seed, k).
BatchResult batch_simulate(const SafeController& ctrl, const DisturbancePolicy& policy,
                           const std::vector<Vec>& initial_states, const IntegratorConfig& cfg,
                           const SimulationOptions& options = {}, int threads = 0);

BatchSummary summarize(const std::vector<Trajectory>& trajectories);

/// count points center + radius (cos t_k, sin t_k), t_k = phase + 2 pi k / count.
std::vector<Vec> ring_states(const Vec& center, double radius, int count, double phase = 0.0);

/// Tensor grid with per_axis points along each axis of the box (endpoints
/// included), first coordinate varying slowest.
std::vector<Vec> grid_states(const Box& box, int per_axis);

}  // namespace nscbf
