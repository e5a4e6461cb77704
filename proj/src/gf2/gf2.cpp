#include "gf2/gf2.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace lab::gf2 {

std::uint8_t parity_dot(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  require(a.size() == b.size(), errc::invalid_argument, "parity_dot: length mismatch");
  unsigned acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc ^= static_cast<unsigned>(a[i] & b[i]);
  return static_cast<std::uint8_t>(acc & 1u);
}

void System::add_row(BitVec coeffs, std::uint8_t target) {
  require(static_cast<int>(coeffs.size()) == unknowns, errc::invalid_argument,
          "gf2::System: row width mismatch");
  rows.emplace_back(std::move(coeffs), static_cast<std::uint8_t>(target & 1u));
}

std::optional<Solution> solve(const System& sys) {
  require(sys.unknowns >= 1, errc::invalid_argument, "gf2::solve: need at least one unknown");
  const int n = sys.unknowns;
  const int m = static_cast<int>(sys.rows.size());

  // Augmented working copy; column n holds the target bit.
  std::vector<BitVec> a(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    a[static_cast<std::size_t>(i)] = sys.rows[static_cast<std::size_t>(i)].first;
    a[static_cast<std::size_t>(i)].push_back(sys.rows[static_cast<std::size_t>(i)].second);
  }

  std::vector<int> pivot_row_of_col(static_cast<std::size_t>(n), -1);
  int rank = 0;
  for (int col = 0; col < n && rank < m; ++col) {
    int pivot = -1;
    for (int r = rank; r < m; ++r) {
      if (a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(a[static_cast<std::size_t>(rank)], a[static_cast<std::size_t>(pivot)]);
    for (int r = 0; r < m; ++r) {
      if (r != rank && a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) {
        for (int c = col; c <= n; ++c)
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] ^=
              a[static_cast<std::size_t>(rank)][static_cast<std::size_t>(c)];
      }
    }
    pivot_row_of_col[static_cast<std::size_t>(col)] = rank;
    ++rank;
  }

  // Any all-zero row with target 1 is a contradiction.
  for (int r = rank; r < m; ++r) {
    bool any = false;
    for (int c = 0; c < n; ++c) any |= a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] != 0;
    if (!any && a[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)]) return std::nullopt;
  }

  Solution sol;
  sol.x.assign(static_cast<std::size_t>(n), 0);
  for (int col = 0; col < n; ++col) {
    int pr = pivot_row_of_col[static_cast<std::size_t>(col)];
    if (pr < 0)
      sol.free_vars.push_back(col);
    else
      sol.x[static_cast<std::size_t>(col)] = a[static_cast<std::size_t>(pr)][static_cast<std::size_t>(n)];
  }
  return sol;
}

}  // namespace lab::gf2
