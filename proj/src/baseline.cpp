#include "rbv/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rbv {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::hgb: return "hgb";
        case ModelKind::dt: return "dt";
        case ModelKind::knn: return "knn";
        case ModelKind::gnb: return "gnb";
    }
    return "?";
}

ModelKind model_kind_from(const std::string& name) {
    if (name == "hgb") return ModelKind::hgb;
    if (name == "dt") return ModelKind::dt;
    if (name == "knn") return ModelKind::knn;
    if (name == "gnb") return ModelKind::gnb;
    throw std::invalid_argument("unknown model kind: " + name);
}

namespace {

std::vector<ClassLabel> labels_from_proba(const std::vector<double>& proba) {
    std::vector<ClassLabel> out(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) {
        // argmax with ties to class 0
        out[i] = proba[i] > 0.5 ? kNonSurvived : kSurvived;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decision tree (CART, Gini)
// ---------------------------------------------------------------------------

struct DtNode {
    int feature = -1;  // -1 for leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double proba1 = 0.0;  // class-1 fraction at the leaf
};

class DecisionTree final : public Classifier {
public:
    explicit DecisionTree(DecisionTreeConfig config) : config_(config) {}

    void fit(const FeatureTable& table) override {
        table.require_finalized();
        table.require_both_classes();
        table_ = &table;
        nodes_.clear();
        std::vector<std::uint32_t> rows(table.n_rows());
        std::iota(rows.begin(), rows.end(), 0u);
        build(rows, 0);
        table_ = nullptr;
    }

    std::vector<double> predict_proba(const FeatureTable& rows) const override {
        std::vector<double> out(rows.n_rows());
        for (std::size_t r = 0; r < rows.n_rows(); ++r) {
            int idx = 0;
            const auto row = rows.row(r);
            while (nodes_[static_cast<std::size_t>(idx)].feature >= 0) {
                const DtNode& n = nodes_[static_cast<std::size_t>(idx)];
                idx = row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
            }
            out[r] = nodes_[static_cast<std::size_t>(idx)].proba1;
        }
        return out;
    }

    std::vector<ClassLabel> predict(const FeatureTable& rows) const override {
        return labels_from_proba(predict_proba(rows));
    }

    std::string name() const override { return "dt"; }

private:
    struct SplitChoice {
        double impurity = std::numeric_limits<double>::infinity();
        int feature = -1;
        double threshold = 0.0;
    };

    int build(const std::vector<std::uint32_t>& rows, int depth) {
        const int index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        std::size_t ones = 0;
        for (const auto r : rows) ones += table_->label(r);
        nodes_.back().proba1 = static_cast<double>(ones) / static_cast<double>(rows.size());

        if (depth >= config_.max_depth || ones == 0 || ones == rows.size() ||
            rows.size() < 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
            return index;
        }
        const SplitChoice split = best_split(rows);
        if (split.feature < 0) return index;

        std::vector<std::uint32_t> left, right;
        for (const auto r : rows) {
            if (table_->at(r, static_cast<std::size_t>(split.feature)) < split.threshold) {
                left.push_back(r);
            } else {
                right.push_back(r);
            }
        }
        nodes_[static_cast<std::size_t>(index)].feature = split.feature;
        nodes_[static_cast<std::size_t>(index)].threshold = split.threshold;
        const int l = build(left, depth + 1);
        nodes_[static_cast<std::size_t>(index)].left = l;
        const int r = build(right, depth + 1);
        nodes_[static_cast<std::size_t>(index)].right = r;
        return index;
    }

    SplitChoice best_split(const std::vector<std::uint32_t>& rows) const {
        SplitChoice best;
        const auto n = static_cast<double>(rows.size());
        std::vector<std::pair<double, std::uint8_t>> vals(rows.size());
        for (std::size_t f = 0; f < table_->n_cols(); ++f) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                vals[i] = {table_->at(rows[i], f), table_->label(rows[i])};
            }
            std::sort(vals.begin(), vals.end());
            double left1 = 0.0;
            double total1 = 0.0;
            for (const auto& [v, y] : vals) total1 += y;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                left1 += vals[i].second;
                if (vals[i].first == vals[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                if (nl < config_.min_samples_leaf || nr < config_.min_samples_leaf) continue;
                const double p1l = left1 / nl;
                const double p1r = (total1 - left1) / nr;
                const double gini =
                    nl / n * 2.0 * p1l * (1.0 - p1l) + nr / n * 2.0 * p1r * (1.0 - p1r);
                if (gini < best.impurity) {
                    best.impurity = gini;
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        return best;
    }

    DecisionTreeConfig config_;
    const FeatureTable* table_ = nullptr;
    std::vector<DtNode> nodes_;
};

// ---------------------------------------------------------------------------
// k-nearest neighbors
// ---------------------------------------------------------------------------

class Knn final : public Classifier {
public:
    explicit Knn(KnnConfig config) : config_(config) {}

    void fit(const FeatureTable& table) override {
        table.require_finalized();
        table.require_both_classes();
        if (static_cast<std::size_t>(config_.k) > table.n_rows()) {
            throw std::invalid_argument("knn: k exceeds training size");
        }
        n_ = table.n_rows();
        d_ = table.n_cols();
        labels_ = table.labels();
        mean_.assign(d_, 0.0);
        scale_.assign(d_, 1.0);
        for (std::size_t c = 0; c < d_; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < n_; ++r) s += table.at(r, c);
            mean_[c] = s / static_cast<double>(n_);
            double ss = 0.0;
            for (std::size_t r = 0; r < n_; ++r) {
                const double dv = table.at(r, c) - mean_[c];
                ss += dv * dv;
            }
            const double sd = std::sqrt(ss / static_cast<double>(n_));
            scale_[c] = sd > 0.0 ? sd : 1.0;
        }
        zed_.resize(n_ * d_);
        for (std::size_t r = 0; r < n_; ++r) {
            for (std::size_t c = 0; c < d_; ++c) {
                zed_[r * d_ + c] = (table.at(r, c) - mean_[c]) / scale_[c];
            }
        }
    }

    std::vector<double> predict_proba(const FeatureTable& rows) const override {
        if (rows.n_cols() != d_) throw std::invalid_argument("knn: feature count mismatch");
        std::vector<double> out(rows.n_rows());
        const auto k = static_cast<std::size_t>(config_.k);
        std::vector<std::pair<double, std::size_t>> dist(n_);
        for (std::size_t r = 0; r < rows.n_rows(); ++r) {
            for (std::size_t t = 0; t < n_; ++t) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < d_; ++c) {
                    const double dv = (rows.at(r, c) - mean_[c]) / scale_[c] - zed_[t * d_ + c];
                    d2 += dv * dv;
                }
                dist[t] = {d2, t};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                              dist.end());
            std::size_t votes1 = 0;
            for (std::size_t t = 0; t < k; ++t) votes1 += labels_[dist[t].second];
            out[r] = static_cast<double>(votes1) / static_cast<double>(k);
        }
        return out;
    }

    std::vector<ClassLabel> predict(const FeatureTable& rows) const override {
        return labels_from_proba(predict_proba(rows));
    }

    std::string name() const override { return "knn"; }

private:
    KnnConfig config_;
    std::size_t n_ = 0, d_ = 0;
    std::vector<double> zed_, mean_, scale_;
    std::vector<ClassLabel> labels_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes
// ---------------------------------------------------------------------------

class GaussianNb final : public Classifier {
public:
    explicit GaussianNb(GaussianNbConfig config) : config_(config) {}

    void fit(const FeatureTable& table) override {
        table.require_finalized();
        table.require_both_classes();
        d_ = table.n_cols();
        double max_var = 0.0;
        for (std::size_t c = 0; c < d_; ++c) {
            const auto col = table.column(c);
            max_var = std::max(max_var, variance(col));
        }
        const double floor = config_.var_smoothing * max_var;
        for (ClassLabel cls : {kSurvived, kNonSurvived}) {
            auto& p = cls == kSurvived ? surv_ : non_;
            p.mean.resize(d_);
            p.var.resize(d_);
            const auto rows = table.rows_with_label(cls);
            p.log_prior = std::log(static_cast<double>(rows.size()) /
                                   static_cast<double>(table.n_rows()));
            for (std::size_t c = 0; c < d_; ++c) {
                std::vector<double> col;
                col.reserve(rows.size());
                for (const auto r : rows) col.push_back(table.at(r, c));
                double m = 0.0;
                for (const double v : col) m += v;
                m /= static_cast<double>(col.size());
                p.mean[c] = m;
                p.var[c] = std::max(variance(col), floor);
                if (p.var[c] <= 0.0) p.var[c] = 1e-300;  // all-constant table
            }
        }
    }

    std::vector<double> predict_proba(const FeatureTable& rows) const override {
        if (rows.n_cols() != d_) throw std::invalid_argument("gnb: feature count mismatch");
        std::vector<double> out(rows.n_rows());
        for (std::size_t r = 0; r < rows.n_rows(); ++r) {
            const double l0 = log_likelihood(surv_, rows.row(r));
            const double l1 = log_likelihood(non_, rows.row(r));
            const double m = std::max(l0, l1);
            const double e0 = std::exp(l0 - m);
            const double e1 = std::exp(l1 - m);
            out[r] = e1 / (e0 + e1);
        }
        return out;
    }

    std::vector<ClassLabel> predict(const FeatureTable& rows) const override {
        return labels_from_proba(predict_proba(rows));
    }

    std::string name() const override { return "gnb"; }

private:
    struct ClassParams {
        std::vector<double> mean, var;
        double log_prior = 0.0;
    };

    static double variance(const std::vector<double>& v) {
        double m = 0.0;
        for (const double x : v) m += x;
        m /= static_cast<double>(v.size());
        double ss = 0.0;
        for (const double x : v) ss += (x - m) * (x - m);
        return ss / static_cast<double>(v.size());
    }

    double log_likelihood(const ClassParams& p, std::span<const double> row) const {
        double ll = p.log_prior;
        for (std::size_t c = 0; c < d_; ++c) {
            const double dv = row[c] - p.mean[c];
            ll += -0.5 * std::log(2.0 * M_PI * p.var[c]) - dv * dv / (2.0 * p.var[c]);
        }
        return ll;
    }

    GaussianNbConfig config_;
    std::size_t d_ = 0;
    ClassParams surv_, non_;
};

// ---------------------------------------------------------------------------
// HGB adapter
// ---------------------------------------------------------------------------

class HgbClassifier final : public Classifier {
public:
    explicit HgbClassifier(HgbConfig config) : config_(config) {}

    void fit(const FeatureTable& table) override { model_ = fit_hgb(table, config_); }

    std::vector<double> predict_proba(const FeatureTable& rows) const override {
        return model_.predict_proba(rows);
    }

    std::vector<ClassLabel> predict(const FeatureTable& rows) const override {
        return model_.predict(rows);
    }

    std::string name() const override { return "hgb"; }

private:
    HgbConfig config_;
    BoostedEnsemble model_;
};

}  // namespace

std::unique_ptr<Classifier> make_decision_tree(const DecisionTreeConfig& config) {
    return std::make_unique<DecisionTree>(config);
}
std::unique_ptr<Classifier> make_knn(const KnnConfig& config) {
    return std::make_unique<Knn>(config);
}
std::unique_ptr<Classifier> make_gaussian_nb(const GaussianNbConfig& config) {
    return std::make_unique<GaussianNb>(config);
}
std::unique_ptr<Classifier> make_hgb_classifier(const HgbConfig& config) {
    return std::make_unique<HgbClassifier>(config);
}

std::unique_ptr<Classifier> make_classifier(ModelKind kind, const HgbConfig& hgb,
                                            const BaselineConfig& baselines) {
    switch (kind) {
        case ModelKind::hgb: return make_hgb_classifier(hgb);
        case ModelKind::dt: return make_decision_tree(baselines.dt);
        case ModelKind::knn: return make_knn(baselines.knn);
        case ModelKind::gnb: return make_gaussian_nb(baselines.gnb);
    }
    throw std::invalid_argument("make_classifier: bad kind");
}

std::unique_ptr<Classifier> fit_baseline(const FeatureTable& table, ModelKind kind,
                                         const BaselineConfig& config) {
    if (kind == ModelKind::hgb) {
        throw std::invalid_argument("fit_baseline: hgb is not a baseline, use fit_hgb");
    }
    auto model = make_classifier(kind, HgbConfig{}, config);
    model->fit(table);
    return model;
}

}  // namespace rbv
