#pragma once

#include <memory>
#include <string>

#include "rbv/hgb.hpp"
#include "rbv/table.hpp"

namespace rbv {

// Shared classifier contract. predict picks the class with the higher score;
// exact ties go to class 0 (survived) for the baselines, while the boosted
// ensemble follows its own "probability >= 0.5 -> class 1" convention.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual void fit(const FeatureTable& table) = 0;
    virtual std::vector<double> predict_proba(const FeatureTable& rows) const = 0;
    virtual std::vector<ClassLabel> predict(const FeatureTable& rows) const = 0;
    virtual std::string name() const = 0;
};

struct DecisionTreeConfig {
    int max_depth = 10;
    int min_samples_leaf = 1;
};

struct KnnConfig {
    int k = 5;
};

struct GaussianNbConfig {
    // variance floor = var_smoothing * max per-feature variance of the
    // training data
    double var_smoothing = 1e-9;
};

struct BaselineConfig {
    DecisionTreeConfig dt;
    KnnConfig knn;
    GaussianNbConfig gnb;
};

enum class ModelKind { hgb, dt, knn, gnb };

std::string to_string(ModelKind kind);
ModelKind model_kind_from(const std::string& name);

// Single CART tree, Gini impurity, raw-value midpoint thresholds,
// deterministic tie-breaking (lowest feature, lowest threshold).
std::unique_ptr<Classifier> make_decision_tree(const DecisionTreeConfig& config = {});
// Majority vote over the k nearest training rows by z-scored Euclidean
// distance; distance ties break by row index.
std::unique_ptr<Classifier> make_knn(const KnnConfig& config = {});
// Per-class per-feature Gaussian likelihoods with a variance floor.
std::unique_ptr<Classifier> make_gaussian_nb(const GaussianNbConfig& config = {});
// The boosted ensemble behind the same interface.
std::unique_ptr<Classifier> make_hgb_classifier(const HgbConfig& config = {});

std::unique_ptr<Classifier> make_classifier(ModelKind kind, const HgbConfig& hgb,
                                            const BaselineConfig& baselines);

// Fits one of the three simple baselines on the table and returns it.
std::unique_ptr<Classifier> fit_baseline(const FeatureTable& table, ModelKind kind,
                                         const BaselineConfig& config = {});

}  // namespace rbv
