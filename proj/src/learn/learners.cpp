#include "learn/learners.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/bits.hpp"
#include "core/error.hpp"
#include "gf2/gf2.hpp"

namespace lab::learn {

namespace {

// Integer -> labels of samples rounding to it, in dataset order.
std::map<std::int64_t, std::vector<std::pair<double, int>>> group_by_integer(const TrainView& data) {
  std::map<std::int64_t, std::vector<std::pair<double, int>>> groups;
  for (std::size_t i = 0; i < data.size(); ++i)
    groups[round_nearest(data.x(i)[0])].emplace_back(data.x(i)[0], data.y(i));
  return groups;
}

}  // namespace

ParityFit learn_parity(const TrainView& data, int bit_width) {
  require(!data.empty(), errc::invalid_argument, "learn_parity: empty dataset");
  require(data.dim() == 1, errc::invalid_argument, "learn_parity: data must be 1-D");
  require(bit_width >= 1 && bit_width <= 30, errc::invalid_argument,
          "learn_parity: bit width out of range");
  const double top = static_cast<double>(std::int64_t(1) << bit_width);
  for (std::size_t i = 0; i < data.size(); ++i)
    require(data.x(i)[0] >= 0.0 && data.x(i)[0] <= top, errc::invalid_argument,
            "learn_parity: sample outside [0, 2^n]");

  ParityFit fit;
  gf2::System sys;
  sys.unknowns = bit_width;
  for (const auto& [z, members] : group_by_integer(data)) {
    std::vector<int> labels;
    labels.reserve(members.size());
    for (const auto& [x, y] : members) labels.push_back(y);
    auto [vote, tie] = majority_vote(labels);
    if (tie) fit.tied_centers.push_back(z);
    sys.add_row(bits_of(static_cast<std::uint64_t>(z), bit_width), static_cast<std::uint8_t>(vote));
  }

  auto sol = gf2::solve(sys);
  require(sol.has_value(), errc::data_corruption,
          "learn_parity: voted labels are inconsistent with every parity set");
  for (const auto& [row, target] : sys.rows)
    require(gf2::parity_dot(row, sol->x) == target, errc::data_corruption,
            "learn_parity: substitution check failed");

  fit.hypothesis.bit_width = bit_width;
  fit.hypothesis.planar = false;
  for (int j = 0; j < bit_width; ++j)
    if (sol->x[static_cast<std::size_t>(j)]) fit.hypothesis.parity_set.push_back(j);
  fit.free_vars = std::move(sol->free_vars);
  return fit;
}

UnionOfIntervals learn_union_intervals(const TrainView& data) {
  require(!data.empty(), errc::invalid_argument, "learn_union_intervals: empty dataset");
  require(data.dim() == 1, errc::invalid_argument, "learn_union_intervals: data must be 1-D");

  UnionOfIntervals h;
  std::vector<std::pair<double, int>> dissenters;
  for (const auto& [z, members] : group_by_integer(data)) {
    std::vector<int> labels;
    labels.reserve(members.size());
    for (const auto& [x, y] : members) labels.push_back(y);
    auto [vote, tie] = majority_vote(labels);
    (void)tie;
    if (vote == 1)
      h.intervals.push_back({static_cast<double>(z) - 0.5, static_cast<double>(z) + 0.5, false, false});
    for (const auto& [x, y] : members)
      if (y != vote) dissenters.emplace_back(x, y);
  }
  std::sort(h.intervals.begin(), h.intervals.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  std::sort(dissenters.begin(), dissenters.end());

  for (const auto& [x, y] : dissenters) {
    if (y == 1) {
      // Stray 1 in a voted-0 region: a point interval fits it at zero measure.
      auto it = std::upper_bound(h.intervals.begin(), h.intervals.end(), x,
                                 [](double v, const auto& iv) { return v < iv.lo; });
      h.intervals.insert(it, {x, x, false, false});
    } else {
      // Stray 0 inside a voted-1 interval: split it, excluding x from both halves.
      auto it = std::lower_bound(h.intervals.begin(), h.intervals.end(), x,
                                 [](const auto& iv, double v) { return iv.hi < v; });
      if (it == h.intervals.end() || !(it->lo < x && x < it->hi)) continue;  // already excluded
      UnionOfIntervals::Interval right{x, it->hi, true, it->hi_open};
      it->hi = x;
      it->hi_open = true;
      h.intervals.insert(std::next(it), right);
    }
  }

  validate(h);
  require(training_error(h, data) == 0.0, errc::data_corruption,
          "learn_union_intervals: output does not interpolate its input");
  return h;
}

double training_error(const UnionOfIntervals& h, const TrainView& data) {
  require(!data.empty(), errc::invalid_argument, "training_error: empty dataset");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    wrong += h.predict1d(data.x(i)[0]) != data.y(i) ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

std::optional<LinearClassifier> fit_perceptron(const TrainView& data, int max_epochs) {
  require(!data.empty(), errc::invalid_argument, "fit_perceptron: empty dataset");
  require(data.num_classes() == 2, errc::invalid_argument, "fit_perceptron: data must be binary");
  require(max_epochs >= 1, errc::invalid_argument, "fit_perceptron: max_epochs must be >= 1");
  const int d = data.dim();

  LinearClassifier h;
  h.w.assign(static_cast<std::size_t>(d), 0.0);
  h.bias = 0.0;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    std::size_t mistakes = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double z = data.y(i) == 1 ? 1.0 : -1.0;
      if (z * h.score(data.x(i)) <= 0.0) {
        for (int j = 0; j < d; ++j)
          h.w[static_cast<std::size_t>(j)] += z * data.x(i)[static_cast<std::size_t>(j)];
        h.bias += z;
        ++mistakes;
      }
    }
    if (mistakes == 0) return h;
  }
  return std::nullopt;
}

}  // namespace lab::learn
