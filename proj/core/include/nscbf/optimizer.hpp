#pragma once

#include <optional>
#include <vector>

#include "nscbf/constraints.hpp"

namespace nscbf {

enum class SolveStatus { kOptimal, kInfeasible, kIterationLimit };

const char* to_string(SolveStatus status);

/// min 1/2 u'Pu + q'u  s.t. u in constraints. P must be symmetric positive
/// definite; the constructor checks both.
class QuadraticProgram {
 public:
  QuadraticProgram(Mat p, Vec q, ConstraintSystem constraints);

  const Mat& p() const { return p_; }
  const Vec& q() const { return q_; }
  const ConstraintSystem& constraints() const { return constraints_; }
  int dim() const { return static_cast<int>(q_.size()); }
  double objective(const Vec& u) const { return 0.5 * u.dot(p_ * u) + q_.dot(u); }

 private:
  Mat p_;
  Vec q_;
  ConstraintSystem constraints_;
};

struct QpSolution {
  Vec u_star;
  double objective = 0.0;
  // Indices into constraints().as_inequalities() forming the final working set.
  std::vector<int> active_rows;
  // One multiplier per inequality in as_inequalities() order; zero off the
  // working set.
  std::vector<double> multipliers;
  SolveStatus status = SolveStatus::kInfeasible;
  int iterations = 0;
  bool rhs_perturbed = false;
};

struct QpOptions {
  // Feasible starting point. Defaults to the clamped unconstrained minimizer
  // when feasible, otherwise the Chebyshev center.
  std::optional<Vec> start;
};

/// Primal active-set method with lowest-index entering/leaving rules.
QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& options = {});

struct KktResidual {
  double stationarity = 0.0;    // ||P u + q + sum lambda_k a_k||_inf
  double min_multiplier = 0.0;  // most negative multiplier
  double complementarity = 0.0; // max |lambda_k (a_k.u - b_k)|
  double primal_violation = 0.0;
};

KktResidual kkt_residual(const QuadraticProgram& qp, const QpSolution& solution);

struct LpSolution {
  double value = 0.0;
  Vec argmin;
  SolveStatus status = SolveStatus::kInfeasible;
};

/// min <cost, u> over the constraint system by vertex enumeration; among
/// optimal vertices the lexicographically smallest is returned.
LpSolution solve_lp(const Vec& cost, const ConstraintSystem& constraints);

/// Vertices of the feasible set (canonical order as ConvexPolytope).
std::vector<Vec> feasible_vertices(const ConstraintSystem& constraints);

struct ChebyshevCenter {
  Vec center;
  double margin = 0.0;  // radius of the largest inscribed ball
};

/// Largest ball inside the feasible set; margin > 0 iff the interior is
/// nonempty. Throws InfeasibleError when the set is empty.
ChebyshevCenter strict_feasibility(const ConstraintSystem& constraints);

/// Grid search over the box followed by projected-gradient polishing.
/// Independent of solve_qp; meant for tests and probes.
QpSolution qp_oracle(const QuadraticProgram& qp, int grid_n, int polish_iters);

/// Euclidean projection onto the feasible set by Dykstra's alternating
/// projections.
Vec project_onto(const ConstraintSystem& constraints, const Vec& u, int max_cycles = 20000,
                 double tol = 1e-15);

}  // namespace nscbf
