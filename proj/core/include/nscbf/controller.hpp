#pragma once

#include <string>

#include "nscbf/errors.hpp"
#include "nscbf/optimizer.hpp"
#include "nscbf/smoothing.hpp"

namespace nscbf {

enum class CostKind { kMinNorm, kNominalTracking };

/// min 1/2 |u|^2, or min 1/2 |u - u_nom(x)|^2 with u_nom(x) = -K_fb x.
struct CostSpec {
  CostKind kind = CostKind::kMinNorm;
  Mat nominal_gain;  // m x n, only read by kNominalTracking
};

class SafeController {
 public:
  SafeController(PiecewiseMinBarrier barrier, LinearInclusion sys, SmoothingParams smoothing,
                 CostSpec cost = {});

  const PiecewiseMinBarrier& barrier() const { return barrier_; }
  const LinearInclusion& system() const { return sys_; }
  const SmoothingParams& smoothing() const { return smoothing_; }
  const Box& input_box() const { return smoothing_.input_box; }
  const CostSpec& cost() const { return cost_; }

  /// Same controller with different smoothing (e.g. the unsmoothed baseline).
  SafeController with_smoothing(SmoothingParams smoothing) const;

 private:
  PiecewiseMinBarrier barrier_;
  LinearInclusion sys_;
  SmoothingParams smoothing_;
  CostSpec cost_;
};

/// Thrown when the constraint map is empty at a state. Carries the data
/// needed to diagnose the modeling failure.
class InfeasibleConstraintsError : public InfeasibleError {
 public:
  InfeasibleConstraintsError(Vec x, double barrier_value, ActiveSets active,
                             ConstraintSystem constraints);

  const Vec& state() const { return x_; }
  double barrier_value() const { return barrier_value_; }
  const ActiveSets& active() const { return active_; }
  const ConstraintSystem& constraints() const { return constraints_; }

 private:
  Vec x_;
  double barrier_value_;
  ActiveSets active_;
  ConstraintSystem constraints_;
};

struct ControlEvaluation {
  Vec u;
  double barrier_value = 0.0;
  double relax = 0.0;
  std::vector<int> exact_active;
  ConstraintSystem constraints;
  QpSolution qp;
};

/// Builds the constraint map at x and solves the QP for kappa*(x).
ControlEvaluation evaluate(const SafeController& ctrl, const Vec& x);

Vec kappa_star(const SafeController& ctrl, const Vec& x);

Vec nominal_input(const SafeController& ctrl, const Vec& x);

}  // namespace nscbf
