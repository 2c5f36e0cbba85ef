#include "nscbf/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nscbf/errors.hpp"

namespace nscbf {

ConstraintSystem::ConstraintSystem(Box box, std::vector<LinearRow> rows)
    : box_(std::move(box)), rows_() {
  rows_.reserve(rows.size());
  for (LinearRow& r : rows) add_row(std::move(r.coeff), r.rhs);
}

void ConstraintSystem::add_row(Vec coeff, double rhs) {
  if (coeff.size() != box_.dim()) {
    throw DimensionError("ConstraintSystem: row of dimension " + std::to_string(coeff.size()) +
                         " for a box of dimension " + std::to_string(box_.dim()));
  }
  if (!coeff.allFinite() || !std::isfinite(rhs)) {
    throw DomainError("ConstraintSystem: non-finite row");
  }
  rows_.push_back({std::move(coeff), rhs});
}

double ConstraintSystem::max_violation(const Vec& u) const {
  double worst = std::max((u - box_.upper()).maxCoeff(), (box_.lower() - u).maxCoeff());
  for (const LinearRow& r : rows_) worst = std::max(worst, r.coeff.dot(u) - r.rhs);
  return worst;
}

std::vector<LinearRow> ConstraintSystem::as_inequalities() const {
  std::vector<LinearRow> out = rows_;
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = 1.0;
    out.push_back({e, box_.upper()(i)});
    out.push_back({-e, -box_.lower()(i)});
  }
  return out;
}

}  // namespace nscbf
