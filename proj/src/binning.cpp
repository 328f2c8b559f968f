#include "rbv/binning.hpp"

#include <algorithm>
#include <stdexcept>

namespace rbv {

std::uint16_t BinMapper::bin_index(std::size_t feature, double value) const {
    const auto& e = edges_[feature];
    const auto it = std::upper_bound(e.begin(), e.end(), value);
    return static_cast<std::uint16_t>(it - e.begin());
}

std::vector<std::uint16_t> BinMapper::bin_table(const FeatureTable& table) const {
    if (table.n_cols() != n_features()) {
        throw std::invalid_argument("bin_table: feature count mismatch");
    }
    std::vector<std::uint16_t> out(table.n_rows() * table.n_cols());
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        std::uint16_t* col = out.data() + c * table.n_rows();
        for (std::size_t r = 0; r < table.n_rows(); ++r) col[r] = bin_index(c, table.at(r, c));
    }
    return out;
}

BinMapper fit_bins(const FeatureTable& table, int max_bins) {
    if (table.n_rows() == 0) throw std::invalid_argument("fit_bins: empty table");
    if (max_bins < 2 || max_bins > 256) {
        throw std::invalid_argument("fit_bins: max_bins must be in [2, 256]");
    }
    const std::size_t n = table.n_rows();
    std::vector<std::vector<double>> edges(table.n_cols());

    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        std::vector<double> sorted = table.column(c);
        std::sort(sorted.begin(), sorted.end());

        // distinct values with multiplicities
        std::vector<double> distinct;
        std::vector<std::size_t> counts;
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            distinct.push_back(sorted[i]);
            counts.push_back(j - i + 1);
            i = j + 1;
        }

        auto& e = edges[c];
        const std::size_t m = distinct.size();
        if (m <= static_cast<std::size_t>(max_bins)) {
            for (std::size_t i = 0; i + 1 < m; ++i) {
                e.push_back(0.5 * (distinct[i] + distinct[i + 1]));
            }
            continue;
        }
        // Equal-frequency cuts: close a bin once its cumulative share reaches
        // the next multiple of n/max_bins. Heavy single values may swallow
        // several targets; the count cap keeps bins <= max_bins.
        std::size_t cum = 0;
        std::size_t next_bin = 1;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            cum += counts[i];
            const double boundary = static_cast<double>(next_bin) * static_cast<double>(n) /
                                    static_cast<double>(max_bins);
            if (static_cast<double>(cum) >= boundary &&
                e.size() + 1 < static_cast<std::size_t>(max_bins)) {
                e.push_back(0.5 * (distinct[i] + distinct[i + 1]));
                while (static_cast<double>(cum) >=
                       static_cast<double>(next_bin) * static_cast<double>(n) /
                           static_cast<double>(max_bins)) {
                    ++next_bin;
                }
            }
        }
        // ensure the final distinct value still lands past the last edge
        if (!e.empty() && e.back() >= distinct.back()) e.pop_back();
    }
    return BinMapper(std::move(edges), max_bins);
}

}  // namespace rbv
