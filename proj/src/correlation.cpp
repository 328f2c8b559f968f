#include "rbv/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rbv/parallel.hpp"
#include "rbv/stats.hpp"

namespace rbv {

std::string to_string(CorrMethod m) {
    switch (m) {
        case CorrMethod::pearson: return "pearson";
        case CorrMethod::spearman: return "spearman";
        case CorrMethod::kendall: return "kendall";
    }
    return "?";
}

std::string to_string(CorrScope s) {
    switch (s) {
        case CorrScope::all: return "all";
        case CorrScope::survived: return "survived";
        case CorrScope::non_survived: return "non_survived";
    }
    return "?";
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("pearson: need two equal-length samples, n >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    return pearson(midranks(x), midranks(y));
}

namespace {

// Discordant-pair count: inversions (strictly decreasing y) in the sequence
// ordered by (x, y), via merge sort.
std::uint64_t count_inversions(std::vector<double>& seq) {
    const std::size_t n = seq.size();
    std::vector<double> buf(n);
    std::uint64_t inv = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (seq[j] < seq[i]) {
                    inv += mid - i;
                    buf[k++] = seq[j++];
                } else {
                    buf[k++] = seq[i++];
                }
            }
            while (i < mid) buf[k++] = seq[i++];
            while (j < hi) buf[k++] = seq[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      seq.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inv;
}

double tie_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        total += t * (t - 1.0) / 2.0;
        i = j + 1;
    }
    return total;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("kendall: need two equal-length samples, n >= 2");
    }
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    double xtie = 0.0, joint = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double t = static_cast<double>(j - i + 1);
        xtie += t * (t - 1.0) / 2.0;
        std::size_t a = i;
        while (a <= j) {
            std::size_t b = a;
            while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
            const double u = static_cast<double>(b - a + 1);
            joint += u * (u - 1.0) / 2.0;
            a = b + 1;
        }
        i = j + 1;
    }
    const double ytie = tie_pairs(std::vector<double>(y.begin(), y.end()));

    std::vector<double> y_in_x_order(n);
    for (std::size_t t = 0; t < n; ++t) y_in_x_order[t] = y[order[t]];
    const auto dis = static_cast<double>(count_inversions(y_in_x_order));

    const double tot = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double num = tot - xtie - ytie + joint - 2.0 * dis;
    const double den = (tot - xtie) * (tot - ytie);
    if (den <= 0.0) return 0.0;
    return std::clamp(num / std::sqrt(den), -1.0, 1.0);
}

namespace {

std::vector<std::size_t> scoped_rows(const FeatureTable& table, CorrScope scope) {
    if (scope == CorrScope::all) {
        std::vector<std::size_t> rows(table.n_rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        return rows;
    }
    return table.rows_with_label(scope == CorrScope::survived ? kSurvived : kNonSurvived);
}

bool is_constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

}  // namespace

CorrelationReport correlate(const FeatureTable& table, CorrMethod method, CorrScope scope) {
    const auto rows = scoped_rows(table, scope);
    if (rows.size() < 2) throw std::invalid_argument("correlate: scope has fewer than 2 rows");

    const std::size_t k = table.n_cols();
    CorrelationReport report;
    report.method = method;
    report.scope = scope;
    report.feature_nos = table.feature_nos();
    report.matrix.assign(k * k, 0.0);

    std::vector<std::vector<double>> cols(k);
    for (std::size_t c = 0; c < k; ++c) {
        cols[c].resize(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) cols[c][r] = table.at(rows[r], c);
    }
    std::vector<bool> constant(k);
    for (std::size_t c = 0; c < k; ++c) {
        constant[c] = is_constant(cols[c]);
        if (constant[c]) report.constant_features.push_back(table.feature_nos()[c]);
    }
    // For Spearman the pairwise kernel reduces to Pearson on per-column ranks.
    std::vector<std::vector<double>> basis(k);
    if (method == CorrMethod::spearman) {
        for (std::size_t c = 0; c < k; ++c) basis[c] = midranks(cols[c]);
    }

    parallel_for(k, [&](std::size_t a) {
        report.matrix[a * k + a] = 1.0;
        for (std::size_t b = a + 1; b < k; ++b) {
            double rho = 0.0;
            if (!constant[a] && !constant[b]) {
                switch (method) {
                    case CorrMethod::pearson: rho = pearson(cols[a], cols[b]); break;
                    case CorrMethod::spearman: rho = pearson(basis[a], basis[b]); break;
                    case CorrMethod::kendall: rho = kendall_tau_b(cols[a], cols[b]); break;
                }
            }
            report.matrix[a * k + b] = rho;
            report.matrix[b * k + a] = rho;
        }
    });
    return report;
}

std::vector<CorrelationDelta> correlation_deltas(const FeatureTable& table, std::size_t top_k) {
    for (ClassLabel cls : {kSurvived, kNonSurvived}) {
        if (table.count_label(cls) < 3) {
            throw std::invalid_argument("correlation_deltas: each class needs >= 3 rows");
        }
    }
    const auto surv = correlate(table, CorrMethod::spearman, CorrScope::survived);
    const auto non = correlate(table, CorrMethod::spearman, CorrScope::non_survived);

    const std::size_t k = table.n_cols();
    std::vector<CorrelationDelta> deltas;
    deltas.reserve(k * (k - 1) / 2);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            CorrelationDelta d;
            d.feature_a = table.feature_nos()[b];  // larger catalog number first
            d.feature_b = table.feature_nos()[a];
            d.rho_survived = surv.at(a, b);
            d.rho_nonsurvived = non.at(a, b);
            d.up = d.rho_nonsurvived > d.rho_survived;
            deltas.push_back(d);
        }
    }
    std::stable_sort(deltas.begin(), deltas.end(), [](const auto& l, const auto& r) {
        const double dl = std::fabs(l.rho_nonsurvived - l.rho_survived);
        const double dr = std::fabs(r.rho_nonsurvived - r.rho_survived);
        if (dl != dr) return dl > dr;
        if (l.feature_a != r.feature_a) return l.feature_a < r.feature_a;
        return l.feature_b < r.feature_b;
    });
    if (deltas.size() > top_k) deltas.resize(top_k);
    return deltas;
}

}  // namespace rbv
