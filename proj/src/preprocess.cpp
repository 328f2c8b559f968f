#include "rbv/preprocess.hpp"

#include <algorithm>
#include <stdexcept>

#include "rbv/quantiles.hpp"

namespace rbv {

FeatureTable impute_mean(const FeatureTable& table) {
    FeatureTable out = table;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (!table.missing(r, c)) {
                sum += table.at(r, c);
                ++n;
            }
        }
        if (n == 0) {
            const auto no = table.feature_nos()[c];
            throw std::invalid_argument("impute_mean: column " + std::to_string(no) +
                                        " is entirely missing");
        }
        const double mean = sum / static_cast<double>(n);
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (table.missing(r, c)) out.at(r, c) = mean;
        }
    }
    return out;
}

FeatureTable winsorize(const FeatureTable& table, double lower_pct, double upper_pct) {
    if (!(lower_pct >= 0.0 && lower_pct < upper_pct && upper_pct <= 100.0)) {
        throw std::invalid_argument("winsorize: need 0 <= lower < upper <= 100");
    }
    FeatureTable out = table;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        std::vector<double> observed;
        observed.reserve(table.n_rows());
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (!table.missing(r, c)) observed.push_back(table.at(r, c));
        }
        if (observed.empty()) continue;
        std::sort(observed.begin(), observed.end());
        const double lo = percentile_sorted(observed, lower_pct);
        const double hi = percentile_sorted(observed, upper_pct);
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (table.missing(r, c)) continue;
            out.at(r, c) = std::clamp(table.at(r, c), lo, hi);
        }
    }
    return out;
}

}  // namespace rbv
