// Internal helper: solve small linear systems over a quotient ring by
// Gauss-Jordan elimination with invertible pivots.  Pivot entries in the
// codes' systems are sums of monomials (x^a + x^b and friends), inverted via
// ring_inv; a system with no invertible pivot available reports failure
// rather than producing a wrong answer.
#pragma once

#include <optional>
#include <vector>

#include "xmds/ring.hpp"

namespace xmds::detail {

// rows[i] = coefficients of equation i; rhs[i] = its right-hand side.
// Returns x with rows * x = rhs, or nullopt if elimination stalls (singular
// or not solvable with invertible pivots).  rows may exceed unknowns; the
// extra equations are used as alternative pivot sources.
inline std::optional<std::vector<RingElement>> solve_linear_system(
    std::vector<std::vector<RingElement>> rows, std::vector<RingElement> rhs) {
  if (rows.empty()) return std::vector<RingElement>{};
  const std::size_t unknowns = rows[0].size();
  const std::size_t neq = rows.size();
  std::vector<std::optional<RingElement>> pivot_inv(neq);
  std::vector<int> pivot_row_of(unknowns, -1);
  std::vector<bool> row_used(neq, false);

  for (std::size_t col = 0; col < unknowns; ++col) {
    // Find an unused equation whose entry at `col` is invertible.
    int chosen = -1;
    std::optional<RingElement> inv;
    for (std::size_t i = 0; i < neq; ++i) {
      if (row_used[i] || rows[i][col].is_zero()) continue;
      inv = ring_inv(rows[i][col]);
      if (inv) {
        chosen = static_cast<int>(i);
        break;
      }
    }
    if (chosen < 0) return std::nullopt;
    row_used[chosen] = true;
    pivot_row_of[col] = chosen;
    pivot_inv[chosen] = inv;
    // Eliminate `col` from every other equation.
    for (std::size_t i = 0; i < neq; ++i) {
      if (static_cast<int>(i) == chosen || rows[i][col].is_zero()) continue;
      RingElement scale = poly_mul(rows[i][col], *inv);
      for (std::size_t c = 0; c < unknowns; ++c)
        rows[i][c] = ring_add(rows[i][c], poly_mul(scale, rows[chosen][c]));
      rhs[i] = ring_add(rhs[i], poly_mul(scale, rhs[chosen]));
    }
  }

  std::vector<RingElement> x;
  x.reserve(unknowns);
  for (std::size_t col = 0; col < unknowns; ++col) {
    int i = pivot_row_of[col];
    x.push_back(poly_mul(rhs[i], *pivot_inv[i]));
  }
  return x;
}

}  // namespace xmds::detail
