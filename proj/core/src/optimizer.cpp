#include "nscbf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "combinations.hpp"
#include "nscbf/errors.hpp"

namespace nscbf {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kActiveTol = 1e-12;
constexpr double kMultiplierTol = 1e-12;
constexpr double kRhsPerturbation = 1e-12;

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

struct Enumeration {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  std::vector<Vec> optimal;  // deduplicated optimal vertices
};

// Solves min cost.z over {a_j.z <= b_j} by visiting every basic solution.
// Assumes the polyhedron is pointed and the optimum is bounded.
Enumeration enumerate_vertices(const Vec& cost, const std::vector<LinearRow>& ineq, int dim) {
  Enumeration out;
  const int n = static_cast<int>(ineq.size());
  Mat lhs(dim, dim);
  Vec rhs(dim);
  detail::for_each_combination(n, dim, [&](std::span<const int> subset) {
    for (int r = 0; r < dim; ++r) {
      lhs.row(r) = ineq[subset[r]].coeff.transpose();
      rhs(r) = ineq[subset[r]].rhs;
    }
    Eigen::FullPivLU<Mat> lu(lhs);
    if (lu.rank() < dim) return true;
    const Vec z = lu.solve(rhs);
    if (!z.allFinite()) return true;
    for (const LinearRow& row : ineq) {
      if (row.coeff.dot(z) > row.rhs + kFeasTol * std::max(1.0, std::abs(row.rhs))) return true;
    }
    out.feasible = true;
    const double value = cost.dot(z);
    const double tie = 1e-12 * std::max(1.0, std::abs(value));
    if (value < out.value - tie) {
      out.value = value;
      out.optimal.clear();
      out.optimal.push_back(z);
    } else if (value <= out.value + tie) {
      const bool dup = std::any_of(out.optimal.begin(), out.optimal.end(), [&](const Vec& v) {
        return (v - z).cwiseAbs().maxCoeff() <= 1e-9;
      });
      if (!dup) out.optimal.push_back(z);
      out.value = std::min(out.value, value);
    }
    return true;
  });
  return out;
}

std::optional<ChebyshevCenter> chebyshev_center(const ConstraintSystem& constraints) {
  const int m = constraints.dim();
  const int k = m + 1;
  const Box& box = constraints.box();
  double magnitude = 1.0;
  std::vector<LinearRow> lifted;
  for (const LinearRow& row : constraints.rows()) {
    Vec a(k);
    a.head(m) = row.coeff;
    a(m) = row.coeff.norm();
    lifted.push_back({a, row.rhs});
    magnitude = std::max(magnitude, std::abs(row.rhs));
  }
  for (int i = 0; i < m; ++i) {
    Vec a = Vec::Zero(k);
    a(i) = 1.0;
    a(m) = 1.0;
    lifted.push_back({a, box.upper()(i)});
    a(i) = -1.0;
    lifted.push_back({a, -box.lower()(i)});
    magnitude = std::max({magnitude, std::abs(box.upper()(i)), std::abs(box.lower()(i))});
  }
  // Radius bounds keep the lifted polyhedron pointed; a radius below the
  // lower bound means the set is far from feasible.
  Vec r_dir = Vec::Zero(k);
  r_dir(m) = 1.0;
  lifted.push_back({r_dir, (box.upper() - box.lower()).maxCoeff() + 1.0});
  lifted.push_back({-r_dir, 2.0 * magnitude + 1.0});

  Vec cost = Vec::Zero(k);
  cost(m) = -1.0;
  const Enumeration e = enumerate_vertices(cost, lifted, k);
  if (!e.feasible) return std::nullopt;
  // The optimal face may be a segment (e.g. a slab); its vertex centroid is
  // a deterministic interior point of that face.
  Vec mean = Vec::Zero(k);
  for (const Vec& v : e.optimal) mean += v;
  mean /= static_cast<double>(e.optimal.size());
  return ChebyshevCenter{mean.head(m), -e.value};
}

bool rows_independent(const std::vector<LinearRow>& ineq, const std::vector<int>& working,
                      int candidate, int dim) {
  const int w = static_cast<int>(working.size()) + 1;
  if (w > dim) return false;
  Mat a(w, dim);
  for (int i = 0; i < w - 1; ++i) a.row(i) = ineq[working[i]].coeff.transpose();
  a.row(w - 1) = ineq[candidate].coeff.transpose();
  Eigen::FullPivLU<Mat> lu(a);
  lu.setThreshold(1e-10);
  return lu.rank() == w;
}

QpSolution active_set(const QuadraticProgram& qp, const std::vector<LinearRow>& ineq, Vec x,
                      int max_iterations) {
  const int m = qp.dim();
  const int n = static_cast<int>(ineq.size());
  QpSolution sol;
  sol.multipliers.assign(n, 0.0);

  std::vector<int> working;
  std::vector<char> in_working(n, 0);
  for (int k = 0; k < n && static_cast<int>(working.size()) < m; ++k) {
    const double slack = ineq[k].rhs - ineq[k].coeff.dot(x);
    if (std::abs(slack) <= kActiveTol * (1.0 + std::abs(ineq[k].rhs)) &&
        rows_independent(ineq, working, k, m)) {
      working.push_back(k);
      in_working[k] = 1;
    }
  }

  for (int it = 0; it < max_iterations; ++it) {
    sol.iterations = it + 1;
    const int w = static_cast<int>(working.size());
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2 * kMaxDim,
                  2 * kMaxDim>
        kkt = decltype(kkt)::Zero(m + w, m + w);
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2 * kMaxDim, 1> rhs =
        decltype(rhs)::Zero(m + w);
    kkt.topLeftCorner(m, m) = qp.p();
    for (int i = 0; i < w; ++i) {
      kkt.block(0, m + i, m, 1) = ineq[working[i]].coeff;
      kkt.block(m + i, 0, 1, m) = ineq[working[i]].coeff.transpose();
    }
    rhs.head(m) = -(qp.p() * x + qp.q());
    const auto step_and_mult = kkt.fullPivLu().solve(rhs).eval();
    const Vec p = step_and_mult.head(m);

    if (p.norm() <= 1e-12 * (1.0 + x.norm())) {
      // Lowest-index constraint with a negative multiplier leaves.
      int leave = -1;
      for (int i = 0; i < w; ++i) {
        const double lambda = step_and_mult(m + i);
        if (lambda < -kMultiplierTol && (leave < 0 || working[i] < working[leave])) leave = i;
      }
      if (leave < 0) {
        for (int i = 0; i < w; ++i) sol.multipliers[working[i]] = step_and_mult(m + i);
        sol.active_rows = working;
        std::sort(sol.active_rows.begin(), sol.active_rows.end());
        sol.u_star = x;
        sol.objective = qp.objective(x);
        sol.status = SolveStatus::kOptimal;
        return sol;
      }
      in_working[working[leave]] = 0;
      working.erase(working.begin() + leave);
      continue;
    }

    double step = 1.0;
    int block = -1;
    for (int k = 0; k < n; ++k) {
      if (in_working[k]) continue;
      const double ap = ineq[k].coeff.dot(p);
      if (ap <= 1e-14) continue;
      const double t = std::max(0.0, (ineq[k].rhs - ineq[k].coeff.dot(x)) / ap);
      if (t < step) {
        step = t;
        block = k;
      }
    }
    x += step * p;
    if (block >= 0) {
      working.push_back(block);
      in_working[block] = 1;
    }
  }
  sol.u_star = x;
  sol.objective = qp.objective(x);
  sol.status = SolveStatus::kIterationLimit;
  return sol;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

QuadraticProgram::QuadraticProgram(Mat p, Vec q, ConstraintSystem constraints)
    : p_(std::move(p)), q_(std::move(q)), constraints_(std::move(constraints)) {
  const Eigen::Index m = constraints_.dim();
  if (p_.rows() != m || p_.cols() != m || q_.size() != m) {
    throw DimensionError("QuadraticProgram: P, q and constraints disagree on dimension");
  }
  if ((p_ - p_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("QuadraticProgram: P is not symmetric");
  }
  Eigen::LLT<Mat> llt(p_);
  if (llt.info() != Eigen::Success) throw DomainError("QuadraticProgram: P is not positive definite");
}

QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& options) {
  const ConstraintSystem& cons = qp.constraints();
  const int m = qp.dim();
  Vec start;
  if (options.start) {
    if (options.start->size() != m) throw DimensionError("solve_qp: start has wrong dimension");
    if (cons.max_violation(*options.start) > kFeasTol) {
      throw DomainError("solve_qp: starting point is infeasible");
    }
    start = *options.start;
  } else {
    const Vec free = Eigen::LLT<Mat>(qp.p()).solve(-qp.q());
    const Vec clamped = cons.box().clamp(free);
    if (cons.max_violation(clamped) <= 0.0) {
      start = clamped;
    } else {
      const std::optional<ChebyshevCenter> center = chebyshev_center(cons);
      if (!center || center->margin < -kActiveTol || cons.max_violation(center->center) > kFeasTol) {
        QpSolution infeasible;
        infeasible.u_star = cons.box().center();
        infeasible.objective = std::numeric_limits<double>::quiet_NaN();
        infeasible.status = SolveStatus::kInfeasible;
        infeasible.multipliers.assign(cons.as_inequalities().size(), 0.0);
        return infeasible;
      }
      start = center->center;
    }
  }

  std::vector<LinearRow> ineq = cons.as_inequalities();
  const int max_iterations = 100 * (m + static_cast<int>(cons.rows().size()));
  QpSolution sol = active_set(qp, ineq, start, max_iterations);
  if (sol.status == SolveStatus::kIterationLimit) {
    // Degenerate cycling: retry on slightly loosened, distinct right-hand sides.
    for (std::size_t k = 0; k < ineq.size(); ++k) {
      ineq[k].rhs += kRhsPerturbation * static_cast<double>(k + 1);
    }
    sol = active_set(qp, ineq, start, max_iterations);
    sol.rhs_perturbed = true;
  }
  return sol;
}

KktResidual kkt_residual(const QuadraticProgram& qp, const QpSolution& solution) {
  const std::vector<LinearRow> ineq = qp.constraints().as_inequalities();
  KktResidual r;
  Vec grad = qp.p() * solution.u_star + qp.q();
  for (std::size_t k = 0; k < ineq.size(); ++k) {
    const double lambda = solution.multipliers.at(k);
    grad += lambda * ineq[k].coeff;
    r.min_multiplier = std::min(r.min_multiplier, lambda);
    r.complementarity = std::max(
        r.complementarity, std::abs(lambda * (ineq[k].coeff.dot(solution.u_star) - ineq[k].rhs)));
  }
  r.stationarity = grad.cwiseAbs().maxCoeff();
  r.primal_violation = std::max(0.0, qp.constraints().max_violation(solution.u_star));
  return r;
}

LpSolution solve_lp(const Vec& cost, const ConstraintSystem& constraints) {
  if (cost.size() != constraints.dim()) throw DimensionError("solve_lp: cost has wrong dimension");
  const Enumeration e = enumerate_vertices(cost, constraints.as_inequalities(), constraints.dim());
  LpSolution out;
  if (!e.feasible) return out;
  out.argmin = *std::min_element(e.optimal.begin(), e.optimal.end(), lex_less);
  out.value = cost.dot(out.argmin);
  out.status = SolveStatus::kOptimal;
  return out;
}

std::vector<Vec> feasible_vertices(const ConstraintSystem& constraints) {
  const Enumeration e =
      enumerate_vertices(Vec::Zero(constraints.dim()), constraints.as_inequalities(),
                         constraints.dim());
  if (!e.feasible) return {};
  return ConvexPolytope::from_points(e.optimal).vertices();
}

ChebyshevCenter strict_feasibility(const ConstraintSystem& constraints) {
  const std::optional<ChebyshevCenter> center = chebyshev_center(constraints);
  if (!center || center->margin < -kActiveTol) {
    throw InfeasibleError("strict_feasibility: constraint set is empty");
  }
  return *center;
}

Vec project_onto(const ConstraintSystem& constraints, const Vec& u, int max_cycles, double tol) {
  const std::vector<LinearRow>& rows = constraints.rows();
  const std::size_t sets = rows.size() + 1;
  std::vector<Vec> increments(sets, Vec::Zero(u.size()));
  Vec x = u;
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    const Vec before = x;
    double increment_change = 0.0;
    for (std::size_t i = 0; i < sets; ++i) {
      const Vec y = x + increments[i];
      Vec projected;
      if (i < rows.size()) {
        const double excess = rows[i].coeff.dot(y) - rows[i].rhs;
        const double norm2 = rows[i].coeff.squaredNorm();
        projected = (excess > 0.0 && norm2 > 0.0) ? Vec(y - (excess / norm2) * rows[i].coeff) : y;
      } else {
        projected = constraints.box().clamp(y);
      }
      // x may repeat across a cycle while the increments still move
      increment_change = std::max(increment_change, (y - projected - increments[i]).norm());
      increments[i] = y - projected;
      x = projected;
    }
    const double scale = tol * (1.0 + x.norm());
    if ((x - before).norm() <= scale && increment_change <= scale) break;
  }
  return x;
}

QpSolution qp_oracle(const QuadraticProgram& qp, int grid_n, int polish_iters) {
  if (grid_n < 2) throw DomainError("qp_oracle: grid_n must be >= 2");
  const ConstraintSystem& cons = qp.constraints();
  const Box& box = cons.box();
  const int m = qp.dim();

  QpSolution sol;
  sol.multipliers.assign(cons.as_inequalities().size(), 0.0);
  bool found = false;
  Vec best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> counter(m, 0);
  while (true) {
    Vec u(m);
    for (int i = 0; i < m; ++i) {
      u(i) = box.lower()(i) + (box.upper()(i) - box.lower()(i)) * counter[i] / (grid_n - 1);
    }
    if (cons.max_violation(u) <= 0.0) {
      const double value = qp.objective(u);
      if (value < best_value) {
        best_value = value;
        best = u;
        found = true;
      }
    }
    int i = 0;
    while (i < m && ++counter[i] == grid_n) counter[i++] = 0;
    if (i == m) break;
  }
  if (!found) {
    best = project_onto(cons, box.center());
    if (cons.max_violation(best) > kFeasTol) {
      sol.u_star = best;
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
  }

  const double lipschitz = Eigen::SelfAdjointEigenSolver<Mat>(qp.p()).eigenvalues().maxCoeff();
  Vec x = best;
  for (int it = 0; it < polish_iters; ++it) {
    const Vec next = project_onto(cons, x - (qp.p() * x + qp.q()) / lipschitz);
    sol.iterations = it + 1;
    const bool settled = (next - x).norm() <= 1e-15 * (1.0 + x.norm());
    x = next;
    if (settled) break;
  }
  sol.u_star = x;
  sol.objective = qp.objective(x);
  sol.status = SolveStatus::kOptimal;
  return sol;
}

}  // namespace nscbf
