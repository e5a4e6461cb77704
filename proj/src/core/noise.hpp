#pragma once

#include "core/rng.hpp"
#include "core/types.hpp"

namespace lab {

/// Flip each label of a binary dataset independently with probability eta.
/// Points are untouched, order is preserved, and the flipped flag marks
/// exactly the samples whose label changed.
Dataset inject_label_noise(const Dataset& ds, double eta, Seed seed);

}  // namespace lab
