#pragma once

#include <span>
#include <string>
#include <vector>

#include "rbv/table.hpp"

namespace rbv {

enum class CorrMethod { pearson, spearman, kendall };
enum class CorrScope { all, survived, non_survived };

std::string to_string(CorrMethod m);
std::string to_string(CorrScope s);

struct CorrelationReport {
    CorrMethod method = CorrMethod::spearman;
    CorrScope scope = CorrScope::all;
    std::vector<int> feature_nos;
    std::vector<double> matrix;  // row-major k x k, symmetric, unit diagonal
    // Features whose column is constant in the scoped rows; their
    // off-diagonal correlations are reported as 0.
    std::vector<int> constant_features;

    double at(std::size_t i, std::size_t j) const { return matrix[i * feature_nos.size() + j]; }
};

struct CorrelationDelta {
    int feature_a = 0;  // higher catalog number first, mirroring the delta table layout
    int feature_b = 0;
    double rho_survived = 0.0;
    double rho_nonsurvived = 0.0;
    bool up = false;  // true iff rho_nonsurvived > rho_survived
};

// Pairwise kernels. Each returns 0 for a pair involving a constant input
// (flagged by the caller); kendall is tau-b with tie correction.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

// Full symmetric matrix over the table's features restricted to the scoped
// rows. Spearman is Pearson on midranks; Kendall uses an O(n log n)
// merge-sort pair count.
CorrelationReport correlate(const FeatureTable& table, CorrMethod method, CorrScope scope);

// Per-class Spearman matrices; pairs ranked by |rho_nonsurvived -
// rho_survived| descending (ties by feature pair), top_k returned.
std::vector<CorrelationDelta> correlation_deltas(const FeatureTable& table, std::size_t top_k);

}  // namespace rbv
