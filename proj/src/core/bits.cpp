#include "core/bits.hpp"

#include <cmath>

#include "core/error.hpp"

namespace lab {

std::int64_t round_nearest(double x) {
  require(std::isfinite(x), errc::invalid_argument, "round_nearest: non-finite input");
  require(std::fabs(x) < 9.0e18, errc::invalid_argument, "round_nearest: magnitude too large");
  return std::llround(x);  // llround rounds halves away from zero
}

std::vector<std::uint8_t> bits_of(std::uint64_t i, int n) {
  require(n >= 1 && n <= 63, errc::invalid_argument, "bits_of: bit count out of range");
  require(i < (1ULL << n), errc::out_of_range, "bits_of: integer does not fit in bit count");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (i >> j) & 1ULL;
  return bits;
}

std::uint64_t uint_of_bits(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) v |= 1ULL << j;
  return v;
}

}  // namespace lab
