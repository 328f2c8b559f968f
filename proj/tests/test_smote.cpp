#include <doctest.h>

#include <cmath>

#include "rbv/rng.hpp"
#include "rbv/smote.hpp"

using namespace rbv;

namespace {

FeatureTable make_table(const std::vector<std::vector<double>>& rows,
                        const std::vector<ClassLabel>& labels, std::vector<int> features) {
    FeatureTable t(std::move(features), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) t.at(r, c) = rows[r][c];
        t.set_label(r, labels[r]);
    }
    return t;
}

}  // namespace

TEST_CASE("already balanced tables come back unchanged") {
    const auto t = make_table({{0, 0}, {1, 1}, {5, 5}, {6, 6}},
                              {kSurvived, kSurvived, kNonSurvived, kNonSurvived}, {1, 2});
    SmoteConfig cfg;
    cfg.k_neighbors = 1;
    const auto res = smote_balance(t, cfg);
    CHECK(res.table.n_rows() == 4);
    CHECK(res.parents.empty());
}

TEST_CASE("identical minority points synthesize duplicates") {
    std::vector<std::vector<double>> rows;
    std::vector<ClassLabel> labels;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({double(i), double(2 * i)});
        labels.push_back(kSurvived);
    }
    for (int i = 0; i < 3; ++i) {
        rows.push_back({4.5, 9.5});
        labels.push_back(kNonSurvived);
    }
    SmoteConfig cfg;
    cfg.k_neighbors = 2;
    cfg.seed = 5;
    const auto res = smote_balance(make_table(rows, labels, {1, 2}), cfg);
    CHECK(res.table.n_rows() == 24);  // 12 + 12
    for (std::size_t r = 15; r < res.table.n_rows(); ++r) {
        CHECK(res.table.at(r, 0) == 4.5);
        CHECK(res.table.at(r, 1) == 9.5);
        CHECK(res.table.label(r) == kNonSurvived);
    }
}

TEST_CASE("two-point minority: every synthetic row lies on the segment") {
    std::vector<std::vector<double>> rows;
    std::vector<ClassLabel> labels;
    for (int i = 0; i < 1002; ++i) {
        rows.push_back({double(i % 7), double(i % 11)});
        labels.push_back(kSurvived);
    }
    rows.push_back({0.0, 0.0});
    labels.push_back(kNonSurvived);
    rows.push_back({1.0, 1.0});
    labels.push_back(kNonSurvived);
    SmoteConfig cfg;
    cfg.k_neighbors = 1;
    cfg.seed = 77;
    const auto res = smote_balance(make_table(rows, labels, {1, 2}), cfg);
    REQUIRE(res.table.n_rows() == 2004);
    for (std::size_t r = 1004; r < res.table.n_rows(); ++r) {
        const double x = res.table.at(r, 0);
        const double y = res.table.at(r, 1);
        CHECK(std::fabs(x - y) < 1e-9);  // collinear with (0,0)-(1,1)
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    // parents point at the two minority rows
    for (const auto& [a, b] : res.parents) {
        CHECK(a >= 1002);
        CHECK(b >= 1002);
        CHECK(a != b);
    }
}

TEST_CASE("synthetic values stay inside the minority bounding box") {
    Rng rng(41);
    std::vector<std::vector<double>> rows;
    std::vector<ClassLabel> labels;
    for (int i = 0; i < 60; ++i) {
        rows.push_back({rng.uniform(0, 100), rng.normal(0, 5)});
        labels.push_back(kSurvived);
    }
    std::vector<double> mins(2, 1e300), maxs(2, -1e300);
    for (int i = 0; i < 12; ++i) {
        rows.push_back({rng.uniform(40, 60), rng.normal(10, 1)});
        labels.push_back(kNonSurvived);
        for (int c = 0; c < 2; ++c) {
            mins[c] = std::min(mins[c], rows.back()[c]);
            maxs[c] = std::max(maxs[c], rows.back()[c]);
        }
    }
    SmoteConfig cfg;
    cfg.seed = 2;
    const auto res = smote_balance(make_table(rows, labels, {1, 2}), cfg);
    for (std::size_t r = 72; r < res.table.n_rows(); ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(res.table.at(r, c) >= mins[c] - 1e-12);
            CHECK(res.table.at(r, c) <= maxs[c] + 1e-12);
        }
    }
}

TEST_CASE("target ratio rounding is to nearest, ties up") {
    std::vector<std::vector<double>> rows;
    std::vector<ClassLabel> labels;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({double(i)});
        labels.push_back(kSurvived);
    }
    for (int i = 0; i < 3; ++i) {
        rows.push_back({double(i) + 0.5});
        labels.push_back(kNonSurvived);
    }
    const auto t = make_table(rows, labels, {1});
    SmoteConfig cfg;
    cfg.k_neighbors = 2;
    cfg.target_ratio = 0.55;  // 5.5 -> 6
    const auto res = smote_balance(t, cfg);
    CHECK(res.table.count_label(kNonSurvived) == 6);
    cfg.target_ratio = 0.54;  // 5.4 -> 5
    CHECK(smote_balance(t, cfg).table.count_label(kNonSurvived) == 5);
    cfg.target_ratio = 1.0;
    CHECK(smote_balance(t, cfg).table.count_label(kNonSurvived) == 10);
}

TEST_CASE("seeds: same seed identical output, different seed same shape") {
    Rng rng(4);
    std::vector<std::vector<double>> rows;
    std::vector<ClassLabel> labels;
    for (int i = 0; i < 40; ++i) {
        rows.push_back({rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1)});
        labels.push_back(i < 30 ? kSurvived : kNonSurvived);
    }
    const auto t = make_table(rows, labels, {1, 2, 3});
    SmoteConfig cfg;
    cfg.k_neighbors = 3;
    cfg.seed = 100;
    const auto a = smote_balance(t, cfg);
    const auto b = smote_balance(t, cfg);
    REQUIRE(a.table.n_rows() == b.table.n_rows());
    for (std::size_t r = 0; r < a.table.n_rows(); ++r) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(a.table.at(r, c) == b.table.at(r, c));
    }
    cfg.seed = 101;
    const auto c = smote_balance(t, cfg);
    CHECK(c.table.n_rows() == a.table.n_rows());
    bool any_diff = false;
    for (std::size_t r = 40; r < a.table.n_rows(); ++r) {
        any_diff = any_diff || a.table.at(r, 0) != c.table.at(r, 0);
    }
    CHECK(any_diff);
    // originals first, untouched
    for (std::size_t r = 0; r < 40; ++r) {
        CHECK(a.table.at(r, 0) == t.at(r, 0));
        CHECK(a.table.label(r) == t.label(r));
    }
}

TEST_CASE("preconditions") {
    const auto tiny = make_table({{0}, {1}, {2}, {3}},
                                 {kSurvived, kSurvived, kSurvived, kNonSurvived}, {1});
    SmoteConfig cfg;
    cfg.k_neighbors = 5;  // minority of 1 cannot have 5 neighbors
    CHECK_THROWS(smote_balance(tiny, cfg));
    cfg.k_neighbors = 0;
    CHECK_THROWS(smote_balance(tiny, cfg));
    cfg.k_neighbors = 1;
    cfg.target_ratio = 1.5;
    CHECK_THROWS(smote_balance(tiny, cfg));
}
