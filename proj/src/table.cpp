#include "rbv/table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbv {

FeatureTable::FeatureTable(std::vector<int> feature_nos, std::size_t n_rows)
    : feature_nos_(std::move(feature_nos)), n_rows_(n_rows) {
    if (!std::is_sorted(feature_nos_.begin(), feature_nos_.end()) ||
        std::adjacent_find(feature_nos_.begin(), feature_nos_.end()) != feature_nos_.end()) {
        throw std::invalid_argument("FeatureTable: feature numbers must be ascending and unique");
    }
    for (int no : feature_nos_) FeatureCatalog::instance().by_no(no);
    values_.assign(n_rows_ * feature_nos_.size(), 0.0);
    missing_.assign(n_rows_ * feature_nos_.size(), 0);
    labels_.assign(n_rows_, kSurvived);
}

bool FeatureTable::has_missing() const {
    return std::any_of(missing_.begin(), missing_.end(), [](std::uint8_t m) { return m != 0; });
}

std::size_t FeatureTable::col_of(int feature_no) const {
    const auto it = std::lower_bound(feature_nos_.begin(), feature_nos_.end(), feature_no);
    if (it == feature_nos_.end() || *it != feature_no) {
        throw std::out_of_range("table has no feature " + std::to_string(feature_no));
    }
    return static_cast<std::size_t>(it - feature_nos_.begin());
}

bool FeatureTable::has_feature(int feature_no) const {
    return std::binary_search(feature_nos_.begin(), feature_nos_.end(), feature_no);
}

std::vector<double> FeatureTable::column(std::size_t col) const {
    std::vector<double> out(n_rows_);
    for (std::size_t r = 0; r < n_rows_; ++r) out[r] = at(r, col);
    return out;
}

std::vector<double> FeatureTable::class_column(std::size_t col, ClassLabel cls) const {
    std::vector<double> out;
    for (std::size_t r = 0; r < n_rows_; ++r) {
        if (labels_[r] == cls) out.push_back(at(r, col));
    }
    return out;
}

std::size_t FeatureTable::count_label(ClassLabel cls) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), cls));
}

std::vector<std::size_t> FeatureTable::rows_with_label(ClassLabel cls) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < n_rows_; ++r) {
        if (labels_[r] == cls) out.push_back(r);
    }
    return out;
}

FeatureTable FeatureTable::subset(const std::vector<int>& features) const {
    std::vector<int> sorted = features;
    std::sort(sorted.begin(), sorted.end());
    FeatureTable out(sorted, n_rows_);
    for (std::size_t c = 0; c < sorted.size(); ++c) {
        const std::size_t src = col_of(sorted[c]);
        for (std::size_t r = 0; r < n_rows_; ++r) {
            out.at(r, c) = at(r, src);
            out.set_missing(r, c, missing(r, src));
        }
    }
    out.labels_ = labels_;
    return out;
}

FeatureTable FeatureTable::take_rows(const std::vector<std::size_t>& rows) const {
    FeatureTable out(feature_nos_, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        if (r >= n_rows_) throw std::out_of_range("take_rows: row index out of range");
        for (std::size_t c = 0; c < n_cols(); ++c) {
            out.at(i, c) = at(r, c);
            out.set_missing(i, c, missing(r, c));
        }
        out.labels_[i] = labels_[r];
    }
    return out;
}

void FeatureTable::append_row(std::span<const double> values, ClassLabel label) {
    if (values.size() != n_cols()) {
        throw std::invalid_argument("append_row: value count does not match column count");
    }
    values_.insert(values_.end(), values.begin(), values.end());
    missing_.insert(missing_.end(), values.size(), 0);
    labels_.push_back(label);
    ++n_rows_;
}

void FeatureTable::require_finalized() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (missing_[i] == 0 && !std::isfinite(values_[i])) {
            throw std::invalid_argument("table not finalized: non-finite value present");
        }
    }
    // Missing cells keep their mask for audit but must have been imputed,
    // which leaves a finite value behind; a still-unimputed cell is NaN.
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (missing_[i] != 0 && !std::isfinite(values_[i])) {
            throw std::invalid_argument("table not finalized: missing cell not imputed");
        }
    }
}

void FeatureTable::require_both_classes() const {
    if (count_label(kSurvived) == 0 || count_label(kNonSurvived) == 0) {
        throw std::invalid_argument("operation requires rows of both classes");
    }
}

}  // namespace rbv
