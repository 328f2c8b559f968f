#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rbv/catalog.hpp"

namespace rbv {

// Class labels: 0 = survived, 1 = non-survived. The positive class for all
// metrics is non-survived.
using ClassLabel = std::uint8_t;
inline constexpr ClassLabel kSurvived = 0;
inline constexpr ClassLabel kNonSurvived = 1;

// Row-major numeric matrix of patients x features, plus labels and a
// missingness mask kept for audit after imputation. Columns are identified by
// catalog feature numbers and always stored in ascending catalog order.
// Instances are plain values: after construction nothing mutates them except
// through the explicit pipeline operations, so sharing read-only across
// threads is safe.
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<int> feature_nos, std::size_t n_rows);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return feature_nos_.size(); }
    const std::vector<int>& feature_nos() const { return feature_nos_; }

    double& at(std::size_t row, std::size_t col) { return values_[row * n_cols() + col]; }
    double at(std::size_t row, std::size_t col) const { return values_[row * n_cols() + col]; }
    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * n_cols(), n_cols()};
    }

    bool missing(std::size_t row, std::size_t col) const {
        return missing_[row * n_cols() + col] != 0;
    }
    void set_missing(std::size_t row, std::size_t col, bool m) {
        missing_[row * n_cols() + col] = m ? 1 : 0;
    }
    bool has_missing() const;

    ClassLabel label(std::size_t row) const { return labels_[row]; }
    void set_label(std::size_t row, ClassLabel l) { labels_[row] = l; }
    const std::vector<ClassLabel>& labels() const { return labels_; }

    // Column index for a catalog feature number; throws if absent.
    std::size_t col_of(int feature_no) const;
    bool has_feature(int feature_no) const;

    std::vector<double> column(std::size_t col) const;
    std::vector<double> column_for(int feature_no) const { return column(col_of(feature_no)); }
    // Column values restricted to one class.
    std::vector<double> class_column(std::size_t col, ClassLabel cls) const;

    std::size_t count_label(ClassLabel cls) const;
    std::vector<std::size_t> rows_with_label(ClassLabel cls) const;

    // New table containing only the given catalog features (ascending order).
    FeatureTable subset(const std::vector<int>& features) const;
    // New table containing only the given rows, in the given order.
    FeatureTable take_rows(const std::vector<std::size_t>& rows) const;
    void append_row(std::span<const double> values, ClassLabel label);

    // Throws unless every value is finite and non-missing and both classes
    // are represented; call before training/testing operations.
    void require_finalized() const;
    void require_both_classes() const;

private:
    std::vector<int> feature_nos_;
    std::size_t n_rows_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> missing_;
    std::vector<ClassLabel> labels_;
};

}  // namespace rbv
