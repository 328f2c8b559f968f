#include "rbv/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rbv/parallel.hpp"
#include "rbv/rng.hpp"

namespace rbv {

ClassLabel ThresholdRule::classify(double x) const {
    bool in_region;
    if (kind == RuleKind::one) {
        in_region = x >= v_th;
    } else {
        in_region = x >= v_th1 && x <= v_th2;
    }
    if (rule_type == 1) return in_region ? kSurvived : kNonSurvived;
    return in_region ? kNonSurvived : kSurvived;
}

namespace {

struct PrefixCounts {
    // candidate[k] for k in 0..m: below the minimum (k=0), midpoints between
    // consecutive distinct values, above the maximum (k=m)
    std::vector<double> candidate;
    // among values strictly below candidate[k]: total count and class-1 count
    std::vector<std::int64_t> cnt;
    std::vector<std::int64_t> ones;
    std::vector<double> distinct;
    std::int64_t n0 = 0;
    std::int64_t n1 = 0;
};

PrefixCounts build_prefix(std::span<const double> values, std::span<const ClassLabel> labels) {
    if (values.size() != labels.size() || values.empty()) {
        throw std::invalid_argument("threshold search: values/labels size mismatch or empty");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    PrefixCounts p;
    for (const ClassLabel l : labels) (l == kNonSurvived ? p.n1 : p.n0)++;
    if (p.n0 == 0 || p.n1 == 0) {
        throw std::invalid_argument("threshold search: both classes required");
    }

    const std::size_t n = values.size();
    p.cnt.push_back(0);
    p.ones.push_back(0);
    std::size_t i = 0;
    std::int64_t cum = 0, cum1 = 0;
    while (i < n) {
        std::size_t j = i;
        std::int64_t group1 = labels[order[i]] == kNonSurvived ? 1 : 0;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
            group1 += labels[order[j]] == kNonSurvived ? 1 : 0;
        }
        p.distinct.push_back(values[order[i]]);
        cum += static_cast<std::int64_t>(j - i + 1);
        cum1 += group1;
        p.cnt.push_back(cum);
        p.ones.push_back(cum1);
        i = j + 1;
    }

    const double lo = p.distinct.front();
    const double hi = p.distinct.back();
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : 1.0;
    p.candidate.push_back(lo - pad);
    for (std::size_t k = 0; k + 1 < p.distinct.size(); ++k) {
        p.candidate.push_back(0.5 * (p.distinct[k] + p.distinct[k + 1]));
    }
    p.candidate.push_back(hi + pad);
    return p;
}

// Snap a candidate to the observed data while preserving the partition it
// induces: a ">= v" bound moves up to the next distinct value, a "<= v" bound
// moves down. Candidates beyond the data on the required side stay put.
double snap_up(const PrefixCounts& p, std::size_t k) {
    return k < p.distinct.size() ? p.distinct[k] : p.candidate[k];
}
double snap_down(const PrefixCounts& p, std::size_t k) {
    return k > 0 ? p.distinct[k - 1] : p.candidate[k];
}

EvalReport report_from(std::int64_t correct0, std::int64_t correct1, std::int64_t n0,
                       std::int64_t n1) {
    ConfusionCounts c;
    c.tn = static_cast<std::uint64_t>(correct0);
    c.fp = static_cast<std::uint64_t>(n0 - correct0);
    c.tp = static_cast<std::uint64_t>(correct1);
    c.fn = static_cast<std::uint64_t>(n1 - correct1);
    return compute_metrics(c);
}

}  // namespace

ThresholdSearchResult search_one(std::span<const double> values,
                                 std::span<const ClassLabel> labels, bool snap_to_data) {
    const PrefixCounts p = build_prefix(values, labels);
    const std::int64_t n0 = p.n0, n1 = p.n1;

    // maximize correct0 * n1 + correct1 * n0 (equivalent to balanced
    // accuracy, but exact in integers)
    std::int64_t best_score = -1;
    std::size_t best_k = 0;
    int best_type = 1;
    for (std::size_t k = 0; k < p.candidate.size(); ++k) {
        const std::int64_t b = p.cnt[k];
        const std::int64_t b1 = p.ones[k];
        const std::int64_t b0 = b - b1;
        const std::int64_t type1 = (n0 - b0) * n1 + b1 * n0;
        const std::int64_t type2 = b0 * n1 + (n1 - b1) * n0;
        if (type1 > best_score) {
            best_score = type1;
            best_k = k;
            best_type = 1;
        }
        if (type2 > best_score) {
            best_score = type2;
            best_k = k;
            best_type = 2;
        }
    }

    ThresholdSearchResult res;
    res.rule.kind = RuleKind::one;
    res.rule.rule_type = best_type;
    res.rule.v_th = snap_to_data ? snap_up(p, best_k) : p.candidate[best_k];
    const std::int64_t b = p.cnt[best_k];
    const std::int64_t b1 = p.ones[best_k];
    const std::int64_t b0 = b - b1;
    const std::int64_t correct0 = best_type == 1 ? n0 - b0 : b0;
    const std::int64_t correct1 = best_type == 1 ? b1 : n1 - b1;
    res.report = report_from(correct0, correct1, n0, n1);
    res.a_th = res.report.a_th;
    return res;
}

ThresholdSearchResult search_two(std::span<const double> values,
                                 std::span<const ClassLabel> labels, bool snap_to_data) {
    const PrefixCounts p = build_prefix(values, labels);
    const std::int64_t n0 = p.n0, n1 = p.n1;
    const std::size_t m = p.candidate.size();

    std::int64_t best_score = -1;
    std::size_t best_i = 0, best_j = 0;
    int best_type = 1;
    for (std::size_t i = 0; i < m; ++i) {
        const std::int64_t ci = p.cnt[i];
        const std::int64_t oi = p.ones[i];
        for (std::size_t j = i; j < m; ++j) {
            const std::int64_t inside = p.cnt[j] - ci;
            const std::int64_t in1 = p.ones[j] - oi;
            const std::int64_t in0 = inside - in1;
            const std::int64_t type1 = in0 * n1 + (n1 - in1) * n0;
            const std::int64_t type2 = (n0 - in0) * n1 + in1 * n0;
            if (type1 > best_score) {
                best_score = type1;
                best_i = i;
                best_j = j;
                best_type = 1;
            }
            if (type2 > best_score) {
                best_score = type2;
                best_i = i;
                best_j = j;
                best_type = 2;
            }
        }
    }

    ThresholdSearchResult res;
    res.rule.kind = RuleKind::two;
    res.rule.rule_type = best_type;
    if (snap_to_data && best_i < best_j) {
        res.rule.v_th1 = snap_up(p, best_i);
        res.rule.v_th2 = snap_down(p, best_j);
    } else {
        // an empty band (i == j) holds no data points, snapping would change
        // the induced partition; keep the raw candidates
        res.rule.v_th1 = p.candidate[best_i];
        res.rule.v_th2 = p.candidate[best_j];
    }
    const std::int64_t inside = p.cnt[best_j] - p.cnt[best_i];
    const std::int64_t in1 = p.ones[best_j] - p.ones[best_i];
    const std::int64_t in0 = inside - in1;
    const std::int64_t correct0 = best_type == 1 ? in0 : n0 - in0;
    const std::int64_t correct1 = best_type == 1 ? n1 - in1 : in1;
    res.report = report_from(correct0, correct1, n0, n1);
    res.a_th = res.report.a_th;
    return res;
}

std::vector<ThresholdSearchResult> search_all(const FeatureTable& table, RuleKind kind,
                                              const ThresholdSearchOptions& options) {
    table.require_finalized();
    table.require_both_classes();

    const FeatureTable* data = &table;
    FeatureTable balanced;
    if (options.balance) {
        SmoteConfig cfg = options.smote;
        cfg.seed = substream_seed(options.seed, "smote");
        balanced = smote_balance(table, cfg).table;
        data = &balanced;
    }

    std::vector<ThresholdSearchResult> results(data->n_cols());
    parallel_for(data->n_cols(), [&](std::size_t c) {
        const auto column = data->column(c);
        results[c] = kind == RuleKind::one
                         ? search_one(column, data->labels(), options.snap_to_data)
                         : search_two(column, data->labels(), options.snap_to_data);
        results[c].rule.feature_no = data->feature_nos()[c];
    });
    return results;
}

}  // namespace rbv
