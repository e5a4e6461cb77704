#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/types.hpp"
#include "learn/hypotheses.hpp"

namespace lab::learn {

struct ParityFit {
  ParityHypothesis hypothesis;
  std::vector<int> free_vars;             // bit positions the support did not pin down
  std::vector<std::int64_t> tied_centers; // integers whose majority vote tied
};

/// Recover the hidden parity set from 1-D data on [0, 2^n]: round every x,
/// majority-vote each integer's label, then solve the resulting GF(2) system.
/// Free variables are zero-filled. An inconsistent system cannot arise from
/// correctly voted parity data, so it raises a data-corruption error.
ParityFit learn_parity(const TrainView& data, int bit_width);

/// The interval learner: per integer z, majority-vote the neighbourhood
/// |x - z| < 0.5 and emit (z-0.5, z+0.5) on a 1-vote; then patch every
/// dissenter, adding point intervals for stray 1s and splitting at stray 0s.
/// The result fits the input exactly (asserted before returning).
UnionOfIntervals learn_union_intervals(const TrainView& data);

/// Classic mistake-driven perceptron with augmented bias. Returns nullopt if
/// no clean pass happens within max_epochs.
std::optional<LinearClassifier> fit_perceptron(const TrainView& data, int max_epochs = 10000);

double training_error(const UnionOfIntervals& h, const TrainView& data);

}  // namespace lab::learn
