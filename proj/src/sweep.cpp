#include "rbv/sweep.hpp"

#include <algorithm>
#include <stdexcept>

#include "rbv/parallel.hpp"

namespace rbv {

namespace {

void sort_by_f1_squared(std::vector<SweepEntry>& entries) {
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.report.f1_squared != b.report.f1_squared) {
            return a.report.f1_squared > b.report.f1_squared;
        }
        return a.features < b.features;
    });
}

}  // namespace

std::vector<SweepEntry> sweep_single(const FeatureTable& table, const HgbConfig& hgb,
                                     const EvalProtocol& protocol) {
    table.require_finalized();
    std::vector<SweepEntry> entries(table.n_cols());
    parallel_for(table.n_cols(), [&](std::size_t c) {
        const int no = table.feature_nos()[c];
        const FeatureTable sub = table.subset({no});
        entries[c].features = {no};
        entries[c].report = evaluate_model(sub, ModelKind::hgb, hgb, BaselineConfig{}, protocol);
    });
    sort_by_f1_squared(entries);
    return entries;
}

std::vector<SweepEntry> significant_features(const std::vector<SweepEntry>& entries,
                                             double cutoff) {
    std::vector<SweepEntry> out;
    for (const auto& e : entries) {
        if (e.report.f1_squared >= cutoff) out.push_back(e);
    }
    return out;
}

std::vector<SweepEntry> sweep_pairs(const FeatureTable& table, const HgbConfig& hgb,
                                    const EvalProtocol& protocol, std::size_t top_k) {
    table.require_finalized();
    if (table.n_cols() < 2) throw std::invalid_argument("sweep_pairs: need >= 2 features");

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t a = 0; a < table.n_cols(); ++a) {
        for (std::size_t b = a + 1; b < table.n_cols(); ++b) {
            pairs.emplace_back(table.feature_nos()[a], table.feature_nos()[b]);
        }
    }
    std::vector<SweepEntry> entries(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        const auto [fa, fb] = pairs[i];
        const FeatureTable sub = table.subset({fa, fb});
        entries[i].features = {fa, fb};
        entries[i].report = evaluate_model(sub, ModelKind::hgb, hgb, BaselineConfig{}, protocol);
    });
    sort_by_f1_squared(entries);
    if (entries.size() > top_k) entries.resize(top_k);
    return entries;
}

MaskGrid make_mask(const BoostedEnsemble& model, const FeatureTable& table,
                   const std::vector<int>& features, std::size_t n_points) {
    if (features.empty() || features.size() > 2) {
        throw std::invalid_argument("make_mask: need 1 or 2 features");
    }
    if (model.feature_nos() != features) {
        throw std::invalid_argument("make_mask: model was not trained on these features");
    }
    if (n_points < 2) throw std::invalid_argument("make_mask: n_points must be >= 2");

    MaskGrid grid;
    for (const int no : features) {
        const auto col = table.column_for(no);
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        const double span = *mx - *mn;
        const double pad = span > 0.0 ? 0.05 * span : 1.0;
        grid.axes.push_back(MaskAxis{no, *mn - pad, *mx + pad, n_points});
    }

    if (features.size() == 1) {
        grid.labels.resize(n_points);
        double coords[1];
        for (std::size_t i = 0; i < n_points; ++i) {
            coords[0] = grid.axes[0].coord(i);
            grid.labels[i] = model.predict_row(std::span<const double>(coords, 1));
        }
        return grid;
    }

    grid.labels.resize(n_points * n_points);
    parallel_for(n_points, [&](std::size_t iy) {
        double coords[2];
        coords[1] = grid.axes[1].coord(iy);
        for (std::size_t ix = 0; ix < n_points; ++ix) {
            coords[0] = grid.axes[0].coord(ix);
            grid.labels[iy * n_points + ix] =
                model.predict_row(std::span<const double>(coords, 2));
        }
    });
    return grid;
}

}  // namespace rbv
