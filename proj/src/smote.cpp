#include "rbv/smote.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbv/rng.hpp"

namespace rbv {

SmoteResult smote_balance(const FeatureTable& table, const SmoteConfig& config) {
    table.require_both_classes();
    if (config.k_neighbors < 1) throw std::invalid_argument("smote: k_neighbors must be >= 1");
    if (!(config.target_ratio > 0.0 && config.target_ratio <= 1.0)) {
        throw std::invalid_argument("smote: target_ratio must be in (0, 1]");
    }

    const std::size_t n_surv = table.count_label(kSurvived);
    const std::size_t n_non = table.count_label(kNonSurvived);
    const ClassLabel minority_label = n_non <= n_surv ? kNonSurvived : kSurvived;
    const std::size_t minority_n = std::min(n_surv, n_non);
    const std::size_t majority_n = std::max(n_surv, n_non);

    const auto target = static_cast<std::size_t>(
        std::floor(config.target_ratio * static_cast<double>(majority_n) + 0.5));

    SmoteResult result{table, {}};
    if (target <= minority_n) return result;  // already at or past the target

    if (minority_n <= static_cast<std::size_t>(config.k_neighbors)) {
        throw std::invalid_argument("smote: minority class size must exceed k_neighbors");
    }

    const auto minority_rows = table.rows_with_label(minority_label);
    const std::size_t m = minority_rows.size();
    const std::size_t d = table.n_cols();

    // z-scale from the minority class so no single wide-range feature
    // dominates the neighbor metric. Constant columns contribute nothing.
    std::vector<double> mean(d, 0.0), scale(d, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t r : minority_rows) s += table.at(r, c);
        mean[c] = s / static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t r : minority_rows) {
            const double dv = table.at(r, c) - mean[c];
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / static_cast<double>(m));
        scale[c] = sd > 0.0 ? sd : 1.0;
    }
    std::vector<double> zed(m * d);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            zed[i * d + c] = (table.at(minority_rows[i], c) - mean[c]) / scale[c];
        }
    }

    const auto k = static_cast<std::size_t>(config.k_neighbors);
    std::vector<std::size_t> knn(m * k);
    std::vector<std::pair<double, std::size_t>> dist(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double dv = zed[i * d + c] - zed[j * d + c];
                d2 += dv * dv;
            }
            dist.emplace_back(d2, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                          dist.end());  // pair ordering breaks ties by index
        for (std::size_t t = 0; t < k; ++t) knn[i * k + t] = dist[t].second;
    }

    Rng rng(substream_seed(config.seed, "smote"));
    std::vector<double> row(d);
    for (std::size_t s = minority_n; s < target; ++s) {
        const std::size_t i = rng.uniform_index(m);
        const std::size_t nn = knn[i * k + rng.uniform_index(k)];
        const double delta = rng.uniform01();
        const std::size_t ri = minority_rows[i];
        const std::size_t rn = minority_rows[nn];
        for (std::size_t c = 0; c < d; ++c) {
            const double a = table.at(ri, c);
            row[c] = a + delta * (table.at(rn, c) - a);
        }
        result.table.append_row(row, minority_label);
        result.parents.emplace_back(ri, rn);
    }
    return result;
}

}  // namespace rbv
