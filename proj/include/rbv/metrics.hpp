#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbv/baseline.hpp"
#include "rbv/smote.hpp"
#include "rbv/table.hpp"

namespace rbv {

// Positive class = non-survived (label 1).
struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

ConfusionCounts confusion_from(const std::vector<ClassLabel>& truth,
                               const std::vector<ClassLabel>& predicted);

// How a model is trained and evaluated. kfold pools out-of-fold predictions
// of a stratified split; train_set fits once and scores the training data
// (the protocol behind near-perfect published tables). paper_mode applies
// SMOTE to the whole dataset before splitting; otherwise balancing happens
// inside each training fold only.
enum class EvalMode { kfold, train_set };

struct EvalProtocol {
    EvalMode mode = EvalMode::kfold;
    int folds = 5;
    bool paper_mode = false;
    bool balance = true;
    SmoteConfig smote{};  // smote.seed is ignored; substreams come from `seed`
    std::uint64_t seed = 42;

    std::string describe() const;
};

struct EvalReport {
    double precision_surv = 0.0;
    double recall_surv = 0.0;
    double f1_surv = 0.0;
    double precision_nonsurv = 0.0;
    double recall_nonsurv = 0.0;
    double f1_nonsurv = 0.0;
    double accuracy = 0.0;
    double a_th = 0.0;        // balanced accuracy: mean of the two recalls
    double f1_squared = 0.0;  // f1_surv * f1_nonsurv
    ConfusionCounts counts;
    std::string protocol;
};

// Per-class precision/recall/F1 with the 0/0 -> 0 convention, the F1^2
// composite, plain accuracy and balanced accuracy.
EvalReport compute_metrics(const ConfusionCounts& counts);

// Stratified fold ids (0..k-1) per row; shuffling is seeded, assignment
// round-robin within each class.
std::vector<int> stratified_folds(const std::vector<ClassLabel>& labels, int k,
                                  std::uint64_t seed);

// Trains/evaluates one model kind under the protocol. Throws if a class has
// fewer rows than there are folds.
EvalReport evaluate_model(const FeatureTable& table, ModelKind kind, const HgbConfig& hgb,
                          const BaselineConfig& baselines, const EvalProtocol& protocol);

// The k-fold path of evaluate_model (kept as its own entry point).
EvalReport kfold_evaluate(const FeatureTable& table, ModelKind kind, const HgbConfig& hgb,
                          const BaselineConfig& baselines, int k, std::uint64_t seed,
                          bool paper_mode, const SmoteConfig& smote = {}, bool balance = true);

}  // namespace rbv
