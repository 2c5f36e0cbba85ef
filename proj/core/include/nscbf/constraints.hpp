#pragma once

#include <vector>

#include "nscbf/geometry.hpp"

namespace nscbf {

/// One inequality <coeff, u> <= rhs.
struct LinearRow {
  Vec coeff;
  double rhs = 0.0;
};

/// {u in box : <coeff_r, u> <= rhs_r for every row r}.
class ConstraintSystem {
 public:
  explicit ConstraintSystem(Box box, std::vector<LinearRow> rows = {});

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const std::vector<LinearRow>& rows() const { return rows_; }

  void add_row(Vec coeff, double rhs);

  /// Largest violation over rows and box bounds (<= 0 means feasible).
  double max_violation(const Vec& u) const;
  bool contains(const Vec& u, double tol = 1e-9) const { return max_violation(u) <= tol; }

  /// Rows followed by the box as  u_i <= upper_i,  -u_i <= -lower_i  for each
  /// coordinate i. Solution index sets refer to this ordering.
  std::vector<LinearRow> as_inequalities() const;

 private:
  Box box_;
  std::vector<LinearRow> rows_;
};

}  // namespace nscbf
