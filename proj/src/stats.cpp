#include "rbv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rbv/special.hpp"

namespace rbv {

ClassQuartiles describe(const FeatureTable& table, int feature_no) {
    const std::size_t col = table.col_of(feature_no);
    auto surv = table.class_column(col, kSurvived);
    auto non = table.class_column(col, kNonSurvived);
    if (surv.empty() || non.empty()) throw std::invalid_argument("describe: empty class");
    return ClassQuartiles{quartiles(std::move(surv)), quartiles(std::move(non))};
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk (AS R94, Royston 1995)
// ---------------------------------------------------------------------------

TestResult shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 5000) {
        throw std::invalid_argument("shapiro_wilk: n must be in [3, 5000]");
    }
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) {
        throw std::invalid_argument("shapiro_wilk: constant sample, W undefined");
    }

    const double an = static_cast<double>(n);
    std::vector<double> m(n);
    double ssumm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        ssumm2 += m[i] * m[i];
    }

    std::vector<double> a(n, 0.0);
    if (n == 3) {
        a[0] = -std::sqrt(0.5);
        a[2] = std::sqrt(0.5);
    } else {
        const double rsn = 1.0 / std::sqrt(an);
        const double norm = std::sqrt(ssumm2);
        auto poly5 = [&](double c5, double c4, double c3, double c2, double c1, double base) {
            return ((((c5 * rsn + c4) * rsn + c3) * rsn + c2) * rsn + c1) * rsn + base;
        };
        const double a_n =
            poly5(-2.706056, 4.434685, -2.071190, -0.147981, 0.221157, m[n - 1] / norm);
        double phi;
        std::size_t tail;  // number of weights taken from the polynomial fits
        if (n > 5) {
            const double a_n1 =
                poly5(-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, m[n - 2] / norm);
            phi = (ssumm2 - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                  (1.0 - 2.0 * a_n * a_n - 2.0 * a_n1 * a_n1);
            a[n - 1] = a_n;
            a[n - 2] = a_n1;
            a[0] = -a_n;
            a[1] = -a_n1;
            tail = 2;
        } else {
            phi = (ssumm2 - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * a_n * a_n);
            a[n - 1] = a_n;
            a[0] = -a_n;
            tail = 1;
        }
        const double scale = std::sqrt(phi);
        for (std::size_t i = tail; i + tail < n; ++i) a[i] = m[i] / scale;
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= an;
    double ssq = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ssq += (x[i] - mean) * (x[i] - mean);
        dot += a[i] * x[i];
    }
    double w = dot * dot / ssq;
    if (w > 1.0) w = 1.0;

    TestResult res;
    res.statistic = w;
    res.n1 = n;
    res.n2 = 0;
    if (n == 3) {
        const double pi6 = 6.0 / M_PI;
        const double stqr = std::asin(std::sqrt(0.75));
        double p = pi6 * (std::asin(std::sqrt(w)) - stqr);
        res.p_value = std::clamp(p, 0.0, 1.0);
        return res;
    }
    const double y = std::log1p(-w);  // log(1 - W)
    double z;
    if (n <= 11) {
        const double gamma = -2.273 + 0.459 * an;
        if (y >= gamma) {
            res.p_value = 1e-99;
            return res;
        }
        const double yy = -std::log(gamma - y);
        const double mu = 0.5440 - 0.39978 * an + 0.025054 * an * an - 6.714e-4 * an * an * an;
        const double sigma =
            std::exp(1.3822 - 0.77857 * an + 0.062767 * an * an - 2.0322e-3 * an * an * an);
        z = (yy - mu) / sigma;
    } else {
        const double xx = std::log(an);
        const double mu = -1.5861 - 0.31082 * xx - 0.083751 * xx * xx + 3.8915e-3 * xx * xx * xx;
        const double sigma = std::exp(-0.4803 - 0.082676 * xx + 0.0030302 * xx * xx);
        z = (y - mu) / sigma;
    }
    res.p_value = std::clamp(1.0 - normal_cdf(z), 0.0, 1.0);
    return res;
}

// ---------------------------------------------------------------------------
// Levene (mean-centered)
// ---------------------------------------------------------------------------

TestResult levene(std::span<const double> sample_a, std::span<const double> sample_b) {
    const std::size_t n1 = sample_a.size();
    const std::size_t n2 = sample_b.size();
    if (n1 < 2 || n2 < 2) throw std::invalid_argument("levene: each sample needs n >= 2");

    auto group_dev = [](std::span<const double> s) {
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        std::vector<double> z(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) z[i] = std::fabs(s[i] - mean);
        return z;
    };
    const auto z1 = group_dev(sample_a);
    const auto z2 = group_dev(sample_b);

    const double nn = static_cast<double>(n1 + n2);
    double zbar1 = 0.0, zbar2 = 0.0;
    for (double v : z1) zbar1 += v;
    for (double v : z2) zbar2 += v;
    zbar1 /= static_cast<double>(n1);
    zbar2 /= static_cast<double>(n2);
    const double zbar = (zbar1 * static_cast<double>(n1) + zbar2 * static_cast<double>(n2)) / nn;

    double between = static_cast<double>(n1) * (zbar1 - zbar) * (zbar1 - zbar) +
                     static_cast<double>(n2) * (zbar2 - zbar) * (zbar2 - zbar);
    double within = 0.0;
    for (double v : z1) within += (v - zbar1) * (v - zbar1);
    for (double v : z2) within += (v - zbar2) * (v - zbar2);

    TestResult res;
    res.n1 = n1;
    res.n2 = n2;
    if (within == 0.0) {
        if (between == 0.0) {
            throw std::invalid_argument("levene: degenerate samples (all deviations zero)");
        }
        // deviations are constant within each group but differ between
        // groups: the F ratio diverges
        res.statistic = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
        return res;
    }
    const double f = (nn - 2.0) * between / within;
    res.statistic = f;
    res.p_value = f_survival(f, 1.0, nn - 2.0);
    return res;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U
// ---------------------------------------------------------------------------

namespace {

struct RankSummary {
    double u1 = 0.0;          // U of sample a
    bool has_ties = false;
    double tie_term = 0.0;    // sum of t^3 - t over tie groups
};

RankSummary rank_summary(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    RankSummary s;
    double r1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
    const double n1 = static_cast<double>(a.size());
    s.u1 = r1 - n1 * (n1 + 1.0) / 2.0;

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) {
            s.has_ties = true;
            s.tie_term += t * t * t - t;
        }
        i = j + 1;
    }
    return s;
}

double normal_approx_p(double u1, std::size_t n1, std::size_t n2, double tie_term) {
    const double fn1 = static_cast<double>(n1);
    const double fn2 = static_cast<double>(n2);
    const double nn = fn1 + fn2;
    const double mu = fn1 * fn2 / 2.0;
    const double var =
        fn1 * fn2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) return 1.0;  // every pooled value identical
    double num = std::fabs(u1 - mu) - 0.5;  // continuity correction
    if (num < 0.0) num = 0.0;
    const double z = num / std::sqrt(var);
    return std::clamp(2.0 * (1.0 - normal_cdf(z)), 0.0, 1.0);
}

// Exact tie-free two-sided p: the null distribution of the rank sum of the
// first sample is built by dynamic programming over which ranks it occupies
// (equivalent to enumerating all C(n1+n2, n1) labelings).
double exact_p(double u1_real, std::size_t n1, std::size_t n2) {
    const std::size_t total = n1 + n2;
    const std::size_t max_u = n1 * n2;
    // ways[j][u]: subsets of size j of the ranks seen so far with U value u.
    std::vector<std::vector<std::uint64_t>> ways(n1 + 1,
                                                 std::vector<std::uint64_t>(max_u + 1, 0));
    ways[0][0] = 1;
    for (std::size_t rank = 1; rank <= total; ++rank) {
        for (std::size_t j = std::min(rank, n1); j >= 1; --j) {
            // picking rank r as the j-th smallest element adds r - j to U
            const std::size_t add = rank - j;
            if (add > max_u) continue;
            for (std::size_t u = max_u - add + 1; u-- > 0;) {
                if (ways[j - 1][u] != 0) ways[j][u + add] += ways[j - 1][u];
            }
        }
    }
    const auto& dist = ways[n1];
    const std::uint64_t total_ways =
        std::accumulate(dist.begin(), dist.end(), std::uint64_t{0});
    const auto u_obs = static_cast<std::size_t>(std::llround(u1_real));
    std::uint64_t low = 0, high = 0;
    for (std::size_t u = 0; u <= max_u; ++u) {
        if (u <= u_obs) low += dist[u];
        if (u >= u_obs) high += dist[u];
    }
    const double tail = static_cast<double>(std::min(low, high)) /
                        static_cast<double>(total_ways);
    return std::min(1.0, 2.0 * tail);
}

}  // namespace

TestResult mann_whitney(std::span<const double> sample_a, std::span<const double> sample_b) {
    if (sample_a.empty() || sample_b.empty()) {
        throw std::invalid_argument("mann_whitney: empty sample");
    }
    const auto s = rank_summary(sample_a, sample_b);
    TestResult res;
    res.statistic = s.u1;
    res.n1 = sample_a.size();
    res.n2 = sample_b.size();
    if (!s.has_ties && sample_a.size() + sample_b.size() <= 20) {
        res.p_value = exact_p(s.u1, sample_a.size(), sample_b.size());
    } else {
        res.p_value = normal_approx_p(s.u1, sample_a.size(), sample_b.size(), s.tie_term);
    }
    return res;
}

TestResult mann_whitney_normal_approx(std::span<const double> sample_a,
                                      std::span<const double> sample_b) {
    if (sample_a.empty() || sample_b.empty()) {
        throw std::invalid_argument("mann_whitney: empty sample");
    }
    const auto s = rank_summary(sample_a, sample_b);
    TestResult res;
    res.statistic = s.u1;
    res.n1 = sample_a.size();
    res.n2 = sample_b.size();
    res.p_value = normal_approx_p(s.u1, sample_a.size(), sample_b.size(), s.tie_term);
    return res;
}

std::vector<int> select_features(const FeatureTable& table, double alpha) {
    table.require_both_classes();
    std::vector<int> selected;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        const auto surv = table.class_column(c, kSurvived);
        const auto non = table.class_column(c, kNonSurvived);
        const auto res = mann_whitney(surv, non);
        if (res.p_value < alpha) selected.push_back(table.feature_nos()[c]);
    }
    return selected;
}

}  // namespace rbv
