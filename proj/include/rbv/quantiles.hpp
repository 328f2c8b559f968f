#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace rbv {

// Percentile by linear interpolation between closest ranks: for p in [0,100]
// the rank is h = (n-1) * p/100 and the result interpolates between the
// values at floor(h) and ceil(h). This convention is pinned project-wide
// (descriptive quartiles, winsorization bounds, bin quantile checks).
inline double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("percentile: empty sample");
    if (p < 0.0 || p > 100.0) throw std::invalid_argument("percentile: p outside [0,100]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    if (lo == hi) return sorted[lo];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return percentile_sorted(values, p);
}

struct Quartiles {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

inline Quartiles quartiles(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return Quartiles{percentile_sorted(values, 50.0), percentile_sorted(values, 25.0),
                     percentile_sorted(values, 75.0)};
}

}  // namespace rbv
