#pragma once

#include <span>
#include <vector>

#include "rbv/quantiles.hpp"
#include "rbv/table.hpp"

namespace rbv {

struct TestResult {
    double statistic = 0.0;  // U (Mann-Whitney), W (Shapiro-Wilk), F (Levene)
    double p_value = 1.0;    // two-sided where applicable
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

struct ClassQuartiles {
    Quartiles survived;
    Quartiles non_survived;
};

// Per-class median / 25th / 75th percentile of one feature (pinned linear
// interpolation convention). Throws if a class is empty.
ClassQuartiles describe(const FeatureTable& table, int feature_no);

// Shapiro-Wilk normality test, Royston's 1995 approximation. Valid for
// 3 <= n <= 5000; a constant sample has no defined W and throws.
TestResult shapiro_wilk(std::span<const double> sample);

// Classic mean-centered Levene test for equal variances of two samples;
// p-value from F(1, n1+n2-2). Throws when every value equals its group mean
// (all deviations zero).
TestResult levene(std::span<const double> sample_a, std::span<const double> sample_b);

// Two-sided Mann-Whitney U test. The statistic is U of sample_a computed
// from midranks. p is exact (full enumeration of the tie-free U distribution)
// when n1+n2 <= 20 and there are no ties, otherwise the normal approximation
// with tie correction and continuity correction.
TestResult mann_whitney(std::span<const double> sample_a, std::span<const double> sample_b);

// Always the normal-approximation p (exposed for the exact-vs-approx checks).
TestResult mann_whitney_normal_approx(std::span<const double> sample_a,
                                      std::span<const double> sample_b);

// Features whose two-sided Mann-Whitney p (survived vs non-survived) is
// strictly below alpha, in catalog order.
std::vector<int> select_features(const FeatureTable& table, double alpha);

// Midranks of a sample (average rank for ties), 1-based.
std::vector<double> midranks(std::span<const double> values);

}  // namespace rbv
