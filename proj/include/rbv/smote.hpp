#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rbv/table.hpp"

namespace rbv {

struct SmoteConfig {
    int k_neighbors = 5;
    double target_ratio = 1.0;  // minority/majority after balancing
    std::uint64_t seed = 0;
};

struct SmoteResult {
    FeatureTable table;  // originals first, synthetic minority rows appended
    // Parent rows (sample, neighbor) of each appended synthetic row, indices
    // into the input table. Lets callers audit fold hygiene.
    std::vector<std::pair<std::size_t, std::size_t>> parents;
};

// Appends interpolated minority rows until minority count equals
// round(target_ratio * majority count), rounding half up. Each synthetic row
// is x + delta * (x_nn - x) with x a uniformly drawn minority row, x_nn one
// of its k nearest minority neighbors by Euclidean distance on z-scored
// features (minority statistics), delta uniform in [0,1). Neighbor ties break
// by row index; the draw sequence is fixed by config.seed.
SmoteResult smote_balance(const FeatureTable& table, const SmoteConfig& config);

}  // namespace rbv
