#pragma once

#include <vector>

#include "learn/hypotheses.hpp"

namespace lab::risk {

/// A finite union of intervals on the line with per-endpoint openness, plus
/// isolated points (lo == hi, both closed). Openness matters: the interval
/// learner's split points are zero-measure holes, yet a hole is exactly what
/// an adversary inside a gamma ball can reach.
class Region1 {
public:
  struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;

    bool is_point() const { return lo == hi; }
  };

  Region1() = default;
  explicit Region1(std::vector<Piece> pieces);  // canonicalizes: sorts and merges

  static Region1 segment(double lo, double hi);

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  bool contains(double x) const;
  double measure() const;

  Region1 unite(const Region1& other) const;
  Region1 intersect(const Region1& other) const;
  /// Complement within the closed segment [lo, hi].
  Region1 complement(double lo, double hi) const;
  /// Minkowski dilation by the closed ball of radius gamma >= 0.
  Region1 dilate(double gamma) const;

private:
  std::vector<Piece> pieces_;  // sorted, pairwise disjoint, non-mergeable
};

/// Decision region {x : h(x) = 1} of a 1-D hypothesis, clipped to [lo, hi].
Region1 decision_region_one(const learn::UnionOfIntervals& h);
Region1 decision_region_one(const learn::ParityHypothesis& h, double lo, double hi);
Region1 decision_region_one(const learn::LinearClassifier& h, double lo, double hi);
Region1 decision_region_one(const learn::NearestNeighbor& h, double lo, double hi);

}  // namespace lab::risk
