#pragma once

#include <cstddef>
#include <vector>

#include "graspkit/error.hpp"

namespace graspkit {

/// Number of distinct rows of the balanced Latin square for n conditions:
/// n when n is even, 2n when n is odd (the second half reverses the first).
inline std::size_t latin_square_rows(std::size_t n_conditions) {
  return n_conditions % 2 == 0 ? n_conditions : 2 * n_conditions;
}

/// Condition order for one participant, counterbalanced for first-order carryover.
/// Row r is r, r+1, r-1, r+2, r-2, ... (mod n). Participants beyond the last row wrap.
inline std::vector<std::size_t> latin_square_order(std::size_t n_conditions, std::size_t participant_index) {
  if (n_conditions < 2) throw InvalidArgument("balanced Latin square needs at least two conditions");
  const std::size_t n = n_conditions;
  const std::size_t row = participant_index % latin_square_rows(n);
  const std::size_t base = row % n;

  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t step = (j + 1) / 2;
    // odd positions step forward, even positions step back
    const std::size_t offset = (j % 2 == 1) ? step % n : (n - step % n) % n;
    order[j] = (base + offset) % n;
  }
  if (row >= n) {
    std::vector<std::size_t> reversed(order.rbegin(), order.rend());
    return reversed;
  }
  return order;
}

}  // namespace graspkit
