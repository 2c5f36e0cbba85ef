#pragma once

#include <array>
#include <span>
#include <vector>

#include "nscbf/geometry.hpp"

namespace nscbf {

inline constexpr double kDefaultTieTol = 1e-9;

/// B_i(x) = <gradient, x> + offset.
struct AffinePiece {
  Vec gradient;
  double offset = 0.0;

  double value(const Vec& x) const { return gradient.dot(x) + offset; }
};

/// Exact and near-active piece indices at a state.
struct ActiveSets {
  std::vector<int> exact;  // B_i(x) <= B(x) + tie_tol
  std::vector<int> near;   // |B_i(x) - B(x)| <= alpha
  double alpha = 0.0;
};

/// Nonsmooth barrier B(x) = min_i B_i(x) over affine pieces. K = {B <= 0} is
/// the safe set; B > 0 marks the unsafe side.
class PiecewiseMinBarrier {
 public:
  explicit PiecewiseMinBarrier(std::vector<AffinePiece> pieces, double tie_tol = kDefaultTieTol);

  int dim() const { return static_cast<int>(pieces_.front().gradient.size()); }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  double tie_tol() const { return tie_tol_; }

  double eval(const Vec& x) const;
  std::vector<int> exact_active(const Vec& x) const;
  ActiveSets active_set(const Vec& x, double alpha) const;

  /// co{grad B_i : i active}.
  ConvexPolytope clarke_gradient(const Vec& x) const;

  MinAffineLevelSet zero_level_set(const Box& window) const;

 private:
  std::vector<AffinePiece> pieces_;
  double tie_tol_;
};

/// Rectangle obstacle given by its center p0 and the four edge midpoints q_i,
/// inflated by the margin d.
struct RectangleObstacleSpec {
  Vec p0;
  std::array<Vec, 4> q;
  double d = 0.0;
};

struct RectangleObstacle {
  PiecewiseMinBarrier barrier;
  HalfspaceSet unsafe_set;  // X_u = {A_u x > b_u}
  HalfspaceSet margin_set;  // {A_u x > b_u - d 1}; the initial set is its complement

  bool in_unsafe(const Vec& x) const { return unsafe_set.contains(x); }
  bool in_initial(const Vec& x) const { return !margin_set.contains(x); }
};

RectangleObstacle from_rectangle(const RectangleObstacleSpec& spec);

struct CandidateViolation {
  enum class Kind { kUnsafeNotPositive, kInitialPositive };
  Vec point;
  double value = 0.0;
  Kind kind = Kind::kUnsafeNotPositive;
};

struct CandidateReport {
  bool pass = true;
  std::vector<CandidateViolation> violations;
};

/// B > 0 on every unsafe sample and B <= 0 on every initial-set sample.
CandidateReport is_candidate_at(const PiecewiseMinBarrier& barrier,
                                std::span<const Vec> samples_unsafe,
                                std::span<const Vec> samples_init);

}  // namespace nscbf
