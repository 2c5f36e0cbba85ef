#include "nscbf/controller.hpp"

#include <sstream>

namespace nscbf {
namespace {

std::string describe(const Vec& x, double b, const ActiveSets& active,
                     const ConstraintSystem& constraints) {
  std::ostringstream os;
  os.precision(17);
  os << "empty constraint set at x = [";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << "], B(x) = " << b << ", active {";
  for (std::size_t i = 0; i < active.exact.size(); ++i) os << (i ? "," : "") << active.exact[i] + 1;
  os << "}, near {";
  for (std::size_t i = 0; i < active.near.size(); ++i) os << (i ? "," : "") << active.near[i] + 1;
  os << "}, rows:";
  for (const LinearRow& row : constraints.rows()) {
    os << " [";
    for (Eigen::Index i = 0; i < row.coeff.size(); ++i) os << (i ? ", " : "") << row.coeff(i);
    os << "].u <= " << row.rhs << ";";
  }
  return os.str();
}

}  // namespace

SafeController::SafeController(PiecewiseMinBarrier barrier, LinearInclusion sys,
                               SmoothingParams smoothing, CostSpec cost)
    : barrier_(std::move(barrier)),
      sys_(std::move(sys)),
      smoothing_(std::move(smoothing)),
      cost_(std::move(cost)) {
  if (barrier_.dim() != sys_.state_dim()) {
    throw DimensionError("SafeController: barrier and system state dimensions differ");
  }
  if (smoothing_.input_box.dim() != sys_.input_dim()) {
    throw DimensionError("SafeController: input box and B_in disagree on input dimension");
  }
  if (smoothing_.blend && !(smoothing_.alpha > barrier_.tie_tol())) {
    throw DomainError("SafeController: alpha must exceed the barrier tie tolerance");
  }
  if (!(smoothing_.m_gain > 0.0)) throw DomainError("SafeController: M must be > 0");
  if (cost_.kind == CostKind::kNominalTracking) {
    if (cost_.nominal_gain.rows() != sys_.input_dim() ||
        cost_.nominal_gain.cols() != sys_.state_dim()) {
      throw DimensionError("SafeController: nominal gain must be m x n");
    }
  }
}

SafeController SafeController::with_smoothing(SmoothingParams smoothing) const {
  return SafeController(barrier_, sys_, std::move(smoothing), cost_);
}

InfeasibleConstraintsError::InfeasibleConstraintsError(Vec x, double barrier_value,
                                                       ActiveSets active,
                                                       ConstraintSystem constraints)
    : InfeasibleError(describe(x, barrier_value, active, constraints)),
      x_(std::move(x)),
      barrier_value_(barrier_value),
      active_(std::move(active)),
      constraints_(std::move(constraints)) {}

ControlEvaluation evaluate(const SafeController& ctrl, const Vec& x) {
  const int m = ctrl.system().input_dim();
  ConstraintSystem constraints =
      smoothed_constraints(ctrl.barrier(), ctrl.system(), ctrl.smoothing(), x);
  Vec q = Vec::Zero(m);
  if (ctrl.cost().kind == CostKind::kNominalTracking) q = -nominal_input(ctrl, x);
  const QuadraticProgram qp(Mat::Identity(m, m), q, constraints);
  QpSolution sol = solve_qp(qp);
  const double b = ctrl.barrier().eval(x);
  if (sol.status != SolveStatus::kOptimal) {
    ActiveSets active;
    if (ctrl.smoothing().blend) {
      active = ctrl.barrier().active_set(x, ctrl.smoothing().alpha);
    } else {
      active.exact = active.near = ctrl.barrier().exact_active(x);
    }
    throw InfeasibleConstraintsError(x, b, std::move(active), std::move(constraints));
  }
  ControlEvaluation out{sol.u_star,
                        b,
                        relaxation(ctrl.barrier(), ctrl.smoothing(), x),
                        ctrl.barrier().exact_active(x),
                        std::move(constraints),
                        std::move(sol)};
  return out;
}

Vec kappa_star(const SafeController& ctrl, const Vec& x) { return evaluate(ctrl, x).u; }

Vec nominal_input(const SafeController& ctrl, const Vec& x) {
  if (ctrl.cost().kind != CostKind::kNominalTracking) {
    throw DomainError("nominal_input: controller cost is not nominal tracking");
  }
  return -(ctrl.cost().nominal_gain * x);
}

}  // namespace nscbf
