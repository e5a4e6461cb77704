#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lab::gf2 {

using BitVec = std::vector<std::uint8_t>;

/// Sum over indices where both vectors are 1, mod 2. Lengths must match.
std::uint8_t parity_dot(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// A linear system over GF(2): each row is (coefficients, target bit).
struct System {
  int unknowns = 0;
  std::vector<std::pair<BitVec, std::uint8_t>> rows;

  void add_row(BitVec coeffs, std::uint8_t target);
};

struct Solution {
  BitVec x;                    // one satisfying assignment, free variables zero-filled
  std::vector<int> free_vars;  // column indices with no pivot
};

/// Gaussian elimination. Pivot choice is the lowest-index remaining row with
/// the leading column set, so identical systems always yield identical
/// solutions. Returns nullopt when the system is inconsistent.
std::optional<Solution> solve(const System& sys);

}  // namespace lab::gf2
