#pragma once

#include <cstdint>
#include <vector>

namespace sag {

// Minimum-cost perfect assignment on a square cost matrix. Returns, for each
// row, the column it is matched to. Among equal-cost optima the result is
// fixed by the row and column order of the matrix.
std::vector<int> hungarian(const std::vector<std::vector<std::int64_t>>& cost);

std::int64_t assignment_cost(const std::vector<std::vector<std::int64_t>>& cost,
                             const std::vector<int>& assignment);

}  // namespace sag
