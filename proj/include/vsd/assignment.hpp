#pragma once

#include "vsd/types.hpp"

#include <vector>

namespace vsd {

/// Minimum-cost perfect matching on a square cost matrix (shortest augmenting
/// path with potentials, O(n^3)). Returns col[i], the column assigned to row i.
std::vector<int> solve_assignment(const Matrix& cost);

}  // namespace vsd
