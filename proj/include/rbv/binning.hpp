#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbv/table.hpp"

namespace rbv {

// Per-feature quantization of raw values into at most max_bins ordered bins.
// With few distinct values the edges sit at midpoints between consecutive
// distinct values (exact binning); otherwise edges follow approximately
// equal-frequency cuts. bin(x) = number of edges <= x, so the mapping is
// monotone and any real maps into [0, bin_count).
class BinMapper {
public:
    BinMapper() = default;
    BinMapper(std::vector<std::vector<double>> edges, int max_bins)
        : edges_(std::move(edges)), max_bins_(max_bins) {}

    std::size_t n_features() const { return edges_.size(); }
    int max_bins() const { return max_bins_; }
    const std::vector<double>& edges(std::size_t feature) const { return edges_[feature]; }
    std::size_t bin_count(std::size_t feature) const { return edges_[feature].size() + 1; }

    std::uint16_t bin_index(std::size_t feature, double value) const;

    // Column-major bin indices for a whole table (features share the mapper's
    // column order).
    std::vector<std::uint16_t> bin_table(const FeatureTable& table) const;

private:
    std::vector<std::vector<double>> edges_;  // strictly increasing per feature
    int max_bins_ = 0;
};

// max_bins in [2, 256]. Throws on an empty table.
BinMapper fit_bins(const FeatureTable& table, int max_bins = 255);

}  // namespace rbv
