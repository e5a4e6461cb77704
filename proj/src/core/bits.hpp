#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lab {

/// Nearest integer; halves round away from zero. The synthetic distributions
/// never put mass on half-integers, so the tie rule only fixes off-support
/// behaviour deterministically. Throws on non-finite input.
std::int64_t round_nearest(double x);

/// Little-endian binary encoding of i (index 0 = least significant bit).
/// Requires 0 <= i < 2^n.
std::vector<std::uint8_t> bits_of(std::uint64_t i, int n);

/// Inverse of bits_of.
std::uint64_t uint_of_bits(std::span<const std::uint8_t> bits);

}  // namespace lab
