#include "rbv/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rbv/parallel.hpp"
#include "rbv/rng.hpp"

namespace rbv {

ConfusionCounts confusion_from(const std::vector<ClassLabel>& truth,
                               const std::vector<ClassLabel>& predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("confusion_from: length mismatch");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == kNonSurvived) {
            predicted[i] == kNonSurvived ? ++c.tp : ++c.fn;
        } else {
            predicted[i] == kNonSurvived ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

namespace {
double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
double f1(double precision, double recall) {
    const double s = precision + recall;
    return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}
}  // namespace

EvalReport compute_metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw std::invalid_argument("compute_metrics: no evaluated rows");
    EvalReport r;
    r.counts = c;
    const auto tp = static_cast<double>(c.tp);
    const auto fp = static_cast<double>(c.fp);
    const auto tn = static_cast<double>(c.tn);
    const auto fn = static_cast<double>(c.fn);
    r.precision_nonsurv = ratio(tp, tp + fp);
    r.recall_nonsurv = ratio(tp, tp + fn);
    r.f1_nonsurv = f1(r.precision_nonsurv, r.recall_nonsurv);
    r.precision_surv = ratio(tn, tn + fn);
    r.recall_surv = ratio(tn, tn + fp);
    r.f1_surv = f1(r.precision_surv, r.recall_surv);
    r.accuracy = (tp + tn) / static_cast<double>(c.total());
    r.a_th = 0.5 * (r.recall_surv + r.recall_nonsurv);
    r.f1_squared = r.f1_surv * r.f1_nonsurv;
    return r;
}

std::string EvalProtocol::describe() const {
    std::string s = mode == EvalMode::kfold
                        ? "stratified " + std::to_string(folds) + "-fold"
                        : "train-set evaluation";
    if (!balance) {
        s += ", unbalanced";
    } else {
        s += paper_mode ? ", smote-before-split" : ", smote-in-train-only";
        s += " (k=" + std::to_string(smote.k_neighbors) + ")";
    }
    s += ", seed " + std::to_string(seed);
    return s;
}

std::vector<int> stratified_folds(const std::vector<ClassLabel>& labels, int k,
                                  std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");
    std::vector<int> fold(labels.size(), -1);
    Rng rng(substream_seed(seed, "folds"));
    for (ClassLabel cls : {kSurvived, kNonSurvived}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) rows.push_back(i);
        }
        if (rows.size() < static_cast<std::size_t>(k)) {
            throw std::invalid_argument("stratified_folds: class smaller than fold count");
        }
        for (std::size_t i = rows.size(); i > 1; --i) {  // Fisher-Yates
            std::swap(rows[i - 1], rows[rng.uniform_index(i)]);
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            fold[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }
    return fold;
}

namespace {

SmoteConfig with_seed(SmoteConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
}

EvalReport train_set_evaluate(const FeatureTable& table, ModelKind kind, const HgbConfig& hgb,
                              const BaselineConfig& baselines, const EvalProtocol& protocol) {
    FeatureTable train = table;
    if (protocol.balance) {
        train = smote_balance(table,
                              with_seed(protocol.smote, substream_seed(protocol.seed, "smote")))
                    .table;
    }
    auto model = make_classifier(kind, hgb, baselines);
    model->fit(train);
    // paper_mode scores the balanced data itself; otherwise only the original
    // rows (which SMOTE keeps first) are scored.
    const FeatureTable& eval_on = protocol.paper_mode ? train : table;
    const auto predicted = model->predict(eval_on);
    EvalReport report = compute_metrics(confusion_from(eval_on.labels(), predicted));
    report.protocol = protocol.describe();
    return report;
}

}  // namespace

EvalReport evaluate_model(const FeatureTable& table, ModelKind kind, const HgbConfig& hgb,
                          const BaselineConfig& baselines, const EvalProtocol& protocol) {
    table.require_finalized();
    table.require_both_classes();
    if (protocol.mode == EvalMode::train_set) {
        return train_set_evaluate(table, kind, hgb, baselines, protocol);
    }

    const FeatureTable* data = &table;
    FeatureTable augmented;
    if (protocol.balance && protocol.paper_mode) {
        augmented = smote_balance(table, with_seed(protocol.smote,
                                                   substream_seed(protocol.seed, "smote")))
                        .table;
        data = &augmented;
    }

    const auto fold_of = stratified_folds(data->labels(), protocol.folds, protocol.seed);
    std::vector<ConfusionCounts> per_fold(static_cast<std::size_t>(protocol.folds));

    parallel_for(static_cast<std::size_t>(protocol.folds), [&](std::size_t f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < data->n_rows(); ++i) {
            (fold_of[i] == static_cast<int>(f) ? test_rows : train_rows).push_back(i);
        }
        FeatureTable train = data->take_rows(train_rows);
        if (protocol.balance && !protocol.paper_mode) {
            // Balancing happens strictly inside the fold: synthetic rows can
            // only descend from training-fold members.
            train = smote_balance(train, with_seed(protocol.smote,
                                                   substream_seed(protocol.seed, "smote", f)))
                        .table;
        }
        const FeatureTable test = data->take_rows(test_rows);
        auto model = make_classifier(kind, hgb, baselines);
        model->fit(train);
        per_fold[f] = confusion_from(test.labels(), model->predict(test));
    });

    ConfusionCounts pooled;
    for (const auto& c : per_fold) pooled += c;
    EvalReport report = compute_metrics(pooled);
    report.protocol = protocol.describe();
    return report;
}

EvalReport kfold_evaluate(const FeatureTable& table, ModelKind kind, const HgbConfig& hgb,
                          const BaselineConfig& baselines, int k, std::uint64_t seed,
                          bool paper_mode, const SmoteConfig& smote, bool balance) {
    EvalProtocol protocol;
    protocol.mode = EvalMode::kfold;
    protocol.folds = k;
    protocol.paper_mode = paper_mode;
    protocol.balance = balance;
    protocol.smote = smote;
    protocol.seed = seed;
    return evaluate_model(table, kind, hgb, baselines, protocol);
}

}  // namespace rbv
