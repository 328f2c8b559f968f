#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbv/binning.hpp"
#include "rbv/table.hpp"

namespace rbv {

struct HgbConfig {
    int max_bins = 255;
    int max_iter = 100;
    int max_leaves = 31;
    int min_samples_leaf = 20;
    double learning_rate = 0.1;
    double l2 = 1.0;          // lambda in the split gain and leaf values
    double min_gain = 1e-12;  // a split must beat this to count as positive
    std::uint64_t seed = 0;   // echoed into reports; training is deterministic
};

struct TreeNode {
    int feature = -1;          // column index; -1 marks a leaf
    int bin_threshold = 0;     // left iff bin(x) <= bin_threshold
    double split_value = 0.0;  // raw-value form of the same test: left iff x < split_value
    int left = -1;
    int right = -1;
    double value = 0.0;        // leaf log-odds contribution, learning rate applied
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double value_for(std::span<const double> row) const;
};

// Gradient-boosted trees over binned features with logistic loss. Trees are
// grown best-first by split gain
//   G_L^2/(H_L+l2) + G_R^2/(H_R+l2) - G^2/(H+l2)
// from per-node gradient/hessian histograms; leaf value = -G/(H+l2) scaled by
// the learning rate. Training is deterministic: binning, split tie-breaking
// (lowest feature, lowest bin) and growth order are all pinned.
class BoostedEnsemble {
public:
    BoostedEnsemble() = default;
    BoostedEnsemble(BinMapper mapper, std::vector<int> feature_nos, double base_score,
                    HgbConfig config)
        : mapper_(std::move(mapper)),
          feature_nos_(std::move(feature_nos)),
          base_score_(base_score),
          config_(config) {}

    const BinMapper& mapper() const { return mapper_; }
    const std::vector<int>& feature_nos() const { return feature_nos_; }
    const std::vector<Tree>& trees() const { return trees_; }
    std::vector<Tree>& trees() { return trees_; }
    double base_score() const { return base_score_; }
    const HgbConfig& config() const { return config_; }

    // Raw additive score using the first n_trees trees (all if SIZE_MAX).
    double raw_score(std::span<const double> row, std::size_t n_trees = SIZE_MAX) const;
    double predict_proba_row(std::span<const double> row) const;
    ClassLabel predict_row(std::span<const double> row) const;

    // Column layout of `rows` must match feature_nos(); throws otherwise.
    std::vector<double> predict_proba(const FeatureTable& rows) const;
    std::vector<ClassLabel> predict(const FeatureTable& rows) const;

private:
    BinMapper mapper_;
    std::vector<int> feature_nos_;
    double base_score_ = 0.0;
    HgbConfig config_;
    std::vector<Tree> trees_;
};

double sigmoid(double x);

// Requires a finalized table with both classes present.
BoostedEnsemble fit_hgb(const FeatureTable& table, const HgbConfig& config = {});

}  // namespace rbv
