#include "rbv/hgb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace rbv {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double Tree::value_for(std::span<const double> row) const {
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
        idx = row[static_cast<std::size_t>(n.feature)] < n.split_value ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(idx)].value;
}

double BoostedEnsemble::raw_score(std::span<const double> row, std::size_t n_trees) const {
    if (row.size() != feature_nos_.size()) {
        throw std::invalid_argument("predict: feature count mismatch");
    }
    double score = base_score_;
    const std::size_t limit = std::min(n_trees, trees_.size());
    for (std::size_t t = 0; t < limit; ++t) score += trees_[t].value_for(row);
    return score;
}

double BoostedEnsemble::predict_proba_row(std::span<const double> row) const {
    return sigmoid(raw_score(row));
}

ClassLabel BoostedEnsemble::predict_row(std::span<const double> row) const {
    return predict_proba_row(row) >= 0.5 ? kNonSurvived : kSurvived;
}

std::vector<double> BoostedEnsemble::predict_proba(const FeatureTable& rows) const {
    if (rows.n_cols() != feature_nos_.size()) {
        throw std::invalid_argument("predict: feature count mismatch");
    }
    std::vector<double> out(rows.n_rows());
    for (std::size_t r = 0; r < rows.n_rows(); ++r) out[r] = predict_proba_row(rows.row(r));
    return out;
}

std::vector<ClassLabel> BoostedEnsemble::predict(const FeatureTable& rows) const {
    const auto proba = predict_proba(rows);
    std::vector<ClassLabel> out(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) {
        out[i] = proba[i] >= 0.5 ? kNonSurvived : kSurvived;
    }
    return out;
}

namespace {

struct Histogram {
    std::vector<double> g;
    std::vector<double> h;
    std::vector<std::uint32_t> c;

    void resize(std::size_t bins) {
        g.assign(bins, 0.0);
        h.assign(bins, 0.0);
        c.assign(bins, 0);
    }
};

struct BestSplit {
    double gain = -std::numeric_limits<double>::infinity();
    int feature = -1;
    int bin = -1;
    double g_left = 0.0;
    double h_left = 0.0;
    std::uint32_t c_left = 0;
};

// A grown-but-not-yet-split node during training.
struct GrowNode {
    std::vector<std::uint32_t> rows;
    double sum_g = 0.0;
    double sum_h = 0.0;
    std::vector<Histogram> hist;  // one per feature
    BestSplit best;
    int node_index = -1;  // position in the output tree
    std::uint64_t seq = 0;
};

struct HeapEntry {
    double gain;
    std::uint64_t seq;
    std::size_t slot;
};
struct HeapCmp {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.gain != b.gain) return a.gain < b.gain;
        return a.seq > b.seq;  // earlier node wins ties
    }
};

}  // namespace

BoostedEnsemble fit_hgb(const FeatureTable& table, const HgbConfig& config) {
    table.require_finalized();
    table.require_both_classes();
    if (config.max_leaves < 2) throw std::invalid_argument("fit_hgb: max_leaves must be >= 2");
    if (config.min_samples_leaf < 1) {
        throw std::invalid_argument("fit_hgb: min_samples_leaf must be >= 1");
    }

    const std::size_t n = table.n_rows();
    const std::size_t n_feat = table.n_cols();
    BinMapper mapper = fit_bins(table, config.max_bins);
    const std::vector<std::uint16_t> bins = mapper.bin_table(table);  // column-major

    const double positives = static_cast<double>(table.count_label(kNonSurvived));
    const double prior = positives / static_cast<double>(n);
    const double base_score = std::log(prior / (1.0 - prior));

    BoostedEnsemble model(std::move(mapper), table.feature_nos(), base_score, config);

    std::vector<double> score(n, base_score);
    std::vector<double> grad(n), hess(n);

    const auto build_hist = [&](const std::vector<std::uint32_t>& rows,
                                std::vector<Histogram>& hist) {
        hist.resize(n_feat);
        for (std::size_t f = 0; f < n_feat; ++f) {
            hist[f].resize(model.mapper().bin_count(f));
            const std::uint16_t* col = bins.data() + f * n;
            for (const std::uint32_t r : rows) {
                const std::uint16_t b = col[r];
                hist[f].g[b] += grad[r];
                hist[f].h[b] += hess[r];
                hist[f].c[b] += 1;
            }
        }
    };

    const double l2 = config.l2;
    const auto find_best = [&](const GrowNode& node) {
        BestSplit best;
        const double parent_term = node.sum_g * node.sum_g / (node.sum_h + l2);
        const auto total = static_cast<std::uint32_t>(node.rows.size());
        for (std::size_t f = 0; f < n_feat; ++f) {
            const Histogram& hist = node.hist[f];
            double gl = 0.0, hl = 0.0;
            std::uint32_t cl = 0;
            for (std::size_t b = 0; b + 1 < hist.g.size(); ++b) {
                gl += hist.g[b];
                hl += hist.h[b];
                cl += hist.c[b];
                if (cl < static_cast<std::uint32_t>(config.min_samples_leaf)) continue;
                const std::uint32_t cr = total - cl;
                if (cr < static_cast<std::uint32_t>(config.min_samples_leaf)) break;
                const double gr = node.sum_g - gl;
                const double hr = node.sum_h - hl;
                const double gain =
                    gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent_term;
                if (gain > best.gain) {
                    best = BestSplit{gain, static_cast<int>(f), static_cast<int>(b),
                                     gl, hl, cl};
                }
            }
        }
        return best;
    };

    for (int iter = 0; iter < config.max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            grad[i] = p - static_cast<double>(table.label(i));
            hess[i] = p * (1.0 - p);
        }

        std::vector<GrowNode> pool;
        pool.reserve(static_cast<std::size_t>(2 * config.max_leaves));
        Tree tree;
        tree.nodes.reserve(static_cast<std::size_t>(2 * config.max_leaves));

        GrowNode root;
        root.rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) root.rows[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < n; ++i) {
            root.sum_g += grad[i];
            root.sum_h += hess[i];
        }
        build_hist(root.rows, root.hist);
        root.best = find_best(root);
        root.node_index = 0;
        root.seq = 0;
        tree.nodes.emplace_back();

        if (!(root.best.gain > config.min_gain)) {
            break;  // nothing left to split anywhere: stop boosting
        }

        pool.push_back(std::move(root));
        std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCmp> heap;
        heap.push(HeapEntry{pool[0].best.gain, 0, 0});
        std::uint64_t next_seq = 1;
        int leaves = 1;

        while (!heap.empty() && leaves < config.max_leaves) {
            const HeapEntry top = heap.top();
            if (!(top.gain > config.min_gain)) break;
            heap.pop();
            GrowNode node = std::move(pool[top.slot]);

            GrowNode left, right;
            left.seq = next_seq++;
            right.seq = next_seq++;
            const std::uint16_t* col = bins.data() + static_cast<std::size_t>(node.best.feature) * n;
            left.rows.reserve(node.best.c_left);
            right.rows.reserve(node.rows.size() - node.best.c_left);
            for (const std::uint32_t r : node.rows) {
                if (col[r] <= static_cast<std::uint16_t>(node.best.bin)) {
                    left.rows.push_back(r);
                } else {
                    right.rows.push_back(r);
                }
            }
            left.sum_g = node.best.g_left;
            left.sum_h = node.best.h_left;
            right.sum_g = node.sum_g - node.best.g_left;
            right.sum_h = node.sum_h - node.best.h_left;

            // direct histogram for the smaller child, subtraction for the other
            if (left.rows.size() <= right.rows.size()) {
                build_hist(left.rows, left.hist);
                right.hist = std::move(node.hist);
                for (std::size_t f = 0; f < n_feat; ++f) {
                    for (std::size_t b = 0; b < right.hist[f].g.size(); ++b) {
                        right.hist[f].g[b] -= left.hist[f].g[b];
                        right.hist[f].h[b] -= left.hist[f].h[b];
                        right.hist[f].c[b] -= left.hist[f].c[b];
                    }
                }
            } else {
                build_hist(right.rows, right.hist);
                left.hist = std::move(node.hist);
                for (std::size_t f = 0; f < n_feat; ++f) {
                    for (std::size_t b = 0; b < left.hist[f].g.size(); ++b) {
                        left.hist[f].g[b] -= right.hist[f].g[b];
                        left.hist[f].h[b] -= right.hist[f].h[b];
                        left.hist[f].c[b] -= right.hist[f].c[b];
                    }
                }
            }
            left.best = find_best(left);
            right.best = find_best(right);

            TreeNode& parent = tree.nodes[static_cast<std::size_t>(node.node_index)];
            parent.feature = node.best.feature;
            parent.bin_threshold = node.best.bin;
            parent.split_value =
                model.mapper().edges(static_cast<std::size_t>(node.best.feature))
                    [static_cast<std::size_t>(node.best.bin)];
            parent.left = static_cast<int>(tree.nodes.size());
            parent.right = static_cast<int>(tree.nodes.size() + 1);
            left.node_index = parent.left;
            right.node_index = parent.right;
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            ++leaves;

            const std::size_t left_slot = pool.size();
            pool.push_back(std::move(left));
            const std::size_t right_slot = pool.size();
            pool.push_back(std::move(right));
            if (pool[left_slot].best.feature >= 0) {
                heap.push(HeapEntry{pool[left_slot].best.gain, pool[left_slot].seq, left_slot});
            }
            if (pool[right_slot].best.feature >= 0) {
                heap.push(HeapEntry{pool[right_slot].best.gain, pool[right_slot].seq, right_slot});
            }
        }

        // everything not split becomes a leaf; apply the Newton step
        for (const GrowNode& gn : pool) {
            TreeNode& tn = tree.nodes[static_cast<std::size_t>(gn.node_index)];
            if (tn.feature >= 0) continue;
            tn.value = -gn.sum_g / (gn.sum_h + l2) * config.learning_rate;
            for (const std::uint32_t r : gn.rows) score[r] += tn.value;
        }
        model.trees().push_back(std::move(tree));
    }
    return model;
}

}  // namespace rbv
