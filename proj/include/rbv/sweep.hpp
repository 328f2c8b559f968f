#pragma once

#include <vector>

#include "rbv/hgb.hpp"
#include "rbv/metrics.hpp"
#include "rbv/table.hpp"

namespace rbv {

struct SweepEntry {
    std::vector<int> features;  // 1 or 2 catalog numbers, ascending
    EvalReport report;
};

// One HGB evaluation per feature under the shared protocol, sorted by F1^2
// descending (ties by feature number).
std::vector<SweepEntry> sweep_single(const FeatureTable& table, const HgbConfig& hgb,
                                     const EvalProtocol& protocol);

// Entries with F1^2 >= cutoff, order preserved.
std::vector<SweepEntry> significant_features(const std::vector<SweepEntry>& entries,
                                             double cutoff);

// Every unordered feature pair of the table, evaluated like sweep_single;
// top_k by F1^2 descending, ties by ascending pair. Pair jobs run on a work
// pool; the ranking is a deterministic sort.
std::vector<SweepEntry> sweep_pairs(const FeatureTable& table, const HgbConfig& hgb,
                                    const EvalProtocol& protocol, std::size_t top_k);

// Grid of model predictions over 1 or 2 feature axes, padded 5% of the data
// range per side. 2D grids are row-major with y (features[1]) as the row axis
// and x (features[0]) as the column axis.
struct MaskAxis {
    int feature_no = 0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n_points = 0;

    double coord(std::size_t i) const {
        if (n_points == 1) return min;
        return min + (max - min) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    }
};

struct MaskGrid {
    std::vector<MaskAxis> axes;        // 1 or 2
    std::vector<ClassLabel> labels;    // 1D: n; 2D: ny rows of nx, row-major

    ClassLabel at(std::size_t ix) const { return labels[ix]; }
    ClassLabel at(std::size_t ix, std::size_t iy) const {
        return labels[iy * axes[0].n_points + ix];
    }
};

// The model must be trained on exactly the listed features (same order as
// the ensemble's columns). Ranges come from the table's columns.
MaskGrid make_mask(const BoostedEnsemble& model, const FeatureTable& table,
                   const std::vector<int>& features, std::size_t n_points = 200);

}  // namespace rbv
