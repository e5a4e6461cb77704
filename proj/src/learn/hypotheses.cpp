#include "learn/hypotheses.hpp"

#include <algorithm>
#include <cmath>

#include "core/bits.hpp"
#include "core/error.hpp"

namespace lab::learn {

double LinearClassifier::score(const Point& x) const {
  require(x.dim() == static_cast<int>(w.size()), errc::invalid_argument,
          "LinearClassifier: dimension mismatch");
  double s = bias;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

int LinearClassifier::predict(const Point& x) const { return score(x) > 0.0 ? 1 : 0; }

void validate(const LinearClassifier& h) {
  bool nonzero = false;
  for (double v : h.w) nonzero |= v != 0.0;
  require(nonzero, errc::invalid_argument, "LinearClassifier: zero weight vector");
}

int ParityHypothesis::predict1d(double x) const {
  std::int64_t i = round_nearest(x);
  if (i < 0) i = 0;
  unsigned acc = 0;
  for (int idx : parity_set) acc ^= static_cast<unsigned>((static_cast<std::uint64_t>(i) >> idx) & 1ULL);
  return static_cast<int>(acc & 1u);
}

int ParityHypothesis::predict(const Point& x) const {
  if (planar) {
    require(x.dim() == 2, errc::invalid_argument, "ParityHypothesis: planar mode needs 2-D input");
    std::int64_t sum = round_nearest(x[0]) + round_nearest(x[1]);
    return (((sum % 2) + 2) % 2 == orientation) ? 1 : 0;
  }
  require(x.dim() == 1, errc::invalid_argument, "ParityHypothesis: 1-D mode needs 1-D input");
  return predict1d(x[0]);
}

int UnionOfIntervals::predict1d(double x) const {
  // Intervals are sorted by lo; find the first with hi >= x and test it.
  auto it = std::lower_bound(intervals.begin(), intervals.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  for (; it != intervals.end() && it->lo <= x; ++it) {
    bool above_lo = x > it->lo || (!it->lo_open && x == it->lo);
    bool below_hi = x < it->hi || (!it->hi_open && x == it->hi);
    if (above_lo && below_hi) return 1;
  }
  return 0;
}

int UnionOfIntervals::predict(const Point& x) const {
  require(x.dim() == 1, errc::invalid_argument, "UnionOfIntervals: input must be 1-D");
  return predict1d(x[0]);
}

void validate(const UnionOfIntervals& h) {
  for (const auto& iv : h.intervals)
    require(iv.lo <= iv.hi, errc::invalid_argument, "UnionOfIntervals: inverted interval");
  for (std::size_t i = 0; i + 1 < h.intervals.size(); ++i) {
    require(h.intervals[i].lo <= h.intervals[i + 1].lo, errc::invalid_argument,
            "UnionOfIntervals: not sorted");
    require(h.intervals[i].hi <= h.intervals[i + 1].lo, errc::invalid_argument,
            "UnionOfIntervals: overlapping interiors");
  }
}

int NearestNeighbor::predict(const Point& x) const {
  require(!stored.empty(), errc::invalid_argument, "NearestNeighbor: empty store");
  require(x.dim() == stored.dim(), errc::invalid_argument, "NearestNeighbor: dimension mismatch");
  double best = squared_distance(stored[0].x, x);
  int best_label = stored[0].label;
  for (std::size_t i = 1; i < stored.size(); ++i) {
    double d = squared_distance(stored[i].x, x);
    if (d < best) {
      best = d;
      best_label = stored[i].label;
    }
  }
  return best_label;
}

std::pair<int, bool> majority_vote(std::span<const int> labels) {
  require(!labels.empty(), errc::invalid_argument, "majority_vote: empty label list");
  std::size_t ones = 0;
  for (int v : labels) {
    require(v == 0 || v == 1, errc::invalid_argument, "majority_vote: labels must be bits");
    ones += static_cast<std::size_t>(v);
  }
  std::size_t zeros = labels.size() - ones;
  if (ones == zeros) return {0, true};
  return {ones > zeros ? 1 : 0, false};
}

}  // namespace lab::learn
