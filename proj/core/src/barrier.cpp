#include "nscbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nscbf/errors.hpp"

namespace nscbf {

PiecewiseMinBarrier::PiecewiseMinBarrier(std::vector<AffinePiece> pieces, double tie_tol)
    : pieces_(std::move(pieces)), tie_tol_(tie_tol) {
  if (pieces_.empty()) throw DomainError("PiecewiseMinBarrier: at least one piece required");
  if (!(tie_tol_ > 0.0)) throw DomainError("PiecewiseMinBarrier: tie_tol must be > 0");
  const Eigen::Index n = pieces_.front().gradient.size();
  if (n < 1 || n > kMaxAmbientDim) throw DimensionError("PiecewiseMinBarrier: dimension must be 1..3");
  for (const AffinePiece& piece : pieces_) {
    if (piece.gradient.size() != n) throw DimensionError("PiecewiseMinBarrier: mixed dimensions");
    if (!piece.gradient.allFinite() || !std::isfinite(piece.offset)) {
      throw DomainError("PiecewiseMinBarrier: non-finite piece");
    }
    if (piece.gradient.norm() == 0.0) throw DomainError("PiecewiseMinBarrier: zero gradient");
  }
}

double PiecewiseMinBarrier::eval(const Vec& x) const {
  if (x.size() != dim()) throw DimensionError("PiecewiseMinBarrier::eval: dimension mismatch");
  double b = std::numeric_limits<double>::infinity();
  for (const AffinePiece& piece : pieces_) b = std::min(b, piece.value(x));
  return b;
}

std::vector<int> PiecewiseMinBarrier::exact_active(const Vec& x) const {
  const double b = eval(x);
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) {
    if (pieces_[i].value(x) <= b + tie_tol_) out.push_back(i);
  }
  return out;
}

ActiveSets PiecewiseMinBarrier::active_set(const Vec& x, double alpha) const {
  if (!(alpha > tie_tol_)) throw DomainError("active_set: alpha must exceed tie_tol");
  const double b = eval(x);
  ActiveSets sets;
  sets.alpha = alpha;
  for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) {
    const double v = pieces_[i].value(x);
    if (v <= b + tie_tol_) sets.exact.push_back(i);
    if (std::abs(v - b) <= alpha) sets.near.push_back(i);
  }
  return sets;
}

ConvexPolytope PiecewiseMinBarrier::clarke_gradient(const Vec& x) const {
  std::vector<Vec> grads;
  for (int i : exact_active(x)) grads.push_back(pieces_[i].gradient);
  return ConvexPolytope::from_points(grads);
}

MinAffineLevelSet PiecewiseMinBarrier::zero_level_set(const Box& window) const {
  if (window.dim() != dim()) throw DimensionError("zero_level_set: window dimension mismatch");
  MinAffineLevelSet out{{}, {}, window};
  for (const AffinePiece& piece : pieces_) {
    out.gradients.push_back(piece.gradient);
    out.offsets.push_back(piece.offset);
  }
  return out;
}

RectangleObstacle from_rectangle(const RectangleObstacleSpec& spec) {
  if (!(spec.d >= 0.0)) throw DomainError("from_rectangle: margin d must be >= 0");
  std::vector<AffinePiece> pieces;
  std::vector<Halfspace> unsafe_rows;
  std::vector<Halfspace> margin_rows;
  for (int i = 0; i < 4; ++i) {
    const Vec& q = spec.q[i];
    if (q.size() != spec.p0.size()) throw DimensionError("from_rectangle: q and p0 dimensions differ");
    const Vec normal = spec.p0 - q;
    if (normal.norm() == 0.0) {
      throw DomainError("from_rectangle: edge midpoint " + std::to_string(i + 1) +
                        " coincides with the center");
    }
    const double b = normal.dot(q);
    pieces.push_back({normal, -b + spec.d});
    unsafe_rows.push_back({normal, b});
    margin_rows.push_back({normal, b - spec.d});
  }
  return RectangleObstacle{PiecewiseMinBarrier(std::move(pieces)),
                           HalfspaceSet(std::move(unsafe_rows), HalfspaceSense::kGreater),
                           HalfspaceSet(std::move(margin_rows), HalfspaceSense::kGreater)};
}

CandidateReport is_candidate_at(const PiecewiseMinBarrier& barrier,
                                std::span<const Vec> samples_unsafe,
                                std::span<const Vec> samples_init) {
  if (samples_unsafe.empty() || samples_init.empty()) {
    throw DomainError("is_candidate_at: sample lists must be nonempty");
  }
  CandidateReport report;
  for (const Vec& x : samples_unsafe) {
    const double b = barrier.eval(x);
    if (!(b > 0.0)) {
      report.violations.push_back({x, b, CandidateViolation::Kind::kUnsafeNotPositive});
    }
  }
  for (const Vec& x : samples_init) {
    const double b = barrier.eval(x);
    if (b > 0.0) report.violations.push_back({x, b, CandidateViolation::Kind::kInitialPositive});
  }
  report.pass = report.violations.empty();
  return report;
}

}  // namespace nscbf
