#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbv/metrics.hpp"
#include "rbv/smote.hpp"
#include "rbv/table.hpp"

namespace rbv {

enum class RuleKind { one, two };

// Single-feature classifier by one cut point or an interval band. Boundary
// values are inclusive exactly as written:
//   one-threshold  Type 1: x >= v_th           -> survived, else non-survived
//                  Type 2: x >= v_th           -> non-survived, else survived
//   two-threshold  Type 1: v_th1 <= x <= v_th2 -> survived, else non-survived
//                  Type 2: v_th1 <= x <= v_th2 -> non-survived, else survived
struct ThresholdRule {
    int feature_no = 0;
    RuleKind kind = RuleKind::one;
    int rule_type = 1;  // 1 or 2
    double v_th = 0.0;   // kind == one
    double v_th1 = 0.0;  // kind == two, v_th1 <= v_th2
    double v_th2 = 0.0;

    ClassLabel classify(double x) const;
};

struct ThresholdSearchResult {
    ThresholdRule rule;
    double a_th = 0.0;  // balanced accuracy of the rule on the searched data
    EvalReport report;
};

struct ThresholdSearchOptions {
    bool balance = true;       // SMOTE-balance the table before searching
    bool snap_to_data = false; // report observed values instead of midpoints
    SmoteConfig smote{};
    std::uint64_t seed = 42;
};

// Exhaustive searches over the candidate set "midpoints between consecutive
// distinct sorted values, plus one candidate below the minimum and one above
// the maximum". Both rule types are evaluated at every candidate (or ordered
// candidate pair); the balanced-accuracy maximizer is returned. Ties break
// toward the smaller threshold(s), then Type 1. Evaluation uses prefix class
// counts, O(1) per candidate pair.
ThresholdSearchResult search_one(std::span<const double> values,
                                 std::span<const ClassLabel> labels,
                                 bool snap_to_data = false);
ThresholdSearchResult search_two(std::span<const double> values,
                                 std::span<const ClassLabel> labels,
                                 bool snap_to_data = false);

// Balances the table (unless told not to), then runs the per-feature search
// on every column. One result per feature in catalog order. No k-fold.
std::vector<ThresholdSearchResult> search_all(const FeatureTable& table, RuleKind kind,
                                              const ThresholdSearchOptions& options = {});

}  // namespace rbv
