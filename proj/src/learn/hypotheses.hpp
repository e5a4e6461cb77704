#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace lab::learn {

/// Halfspace: predicts 1 iff w.x + bias > 0.
struct LinearClassifier {
  std::vector<double> w;
  double bias = 0.0;

  int predict(const Point& x) const;
  double score(const Point& x) const;
};

void validate(const LinearClassifier& h);

/// Parity of selected bits of the nearest integer. In planar mode the rule is
/// instead: 1 iff round(x1) + round(x2) == orientation (mod 2).
struct ParityHypothesis {
  int bit_width = 0;
  std::vector<int> parity_set;
  bool planar = false;
  int orientation = 1;

  int predict(const Point& x) const;
  int predict1d(double x) const;
};

/// 1-D classifier: predicts 1 inside any of a sorted list of disjoint
/// intervals, 0 elsewhere. Endpoints are closed unless an open flag is set;
/// the patch phase of the interval learner needs open endpoints at excluded
/// split points, and point intervals (lo == hi) are allowed.
struct UnionOfIntervals {
  struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_open = false;
    bool hi_open = false;
  };

  std::vector<Interval> intervals;

  int predict(const Point& x) const;
  int predict1d(double x) const;
  std::size_t size() const { return intervals.size(); }
};

void validate(const UnionOfIntervals& h);

/// Memorizing interpolator: label of the L2-nearest stored sample, ties
/// resolved toward the lowest stored index.
struct NearestNeighbor {
  Dataset stored;

  int predict(const Point& x) const;
};

/// Modal label of a non-empty bit list; ties report (0, true).
std::pair<int, bool> majority_vote(std::span<const int> labels);

}  // namespace lab::learn
