#pragma once

#include <vector>

#include "stylos/sparse.hpp"

namespace stylos::optim::detail {

// Checks |X| = |y|, labels in {0, 1} with both present, finite values.
// Returns the feature dimension implied by X.
std::size_t validate_binary(const std::vector<SparseVector>& X, const std::vector<int>& y);

}  // namespace stylos::optim::detail
