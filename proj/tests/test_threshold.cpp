#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rbv/rng.hpp"
#include "rbv/threshold.hpp"

using namespace rbv;

namespace {

std::pair<std::vector<double>, std::vector<ClassLabel>> random_dataset(Rng& rng,
                                                                       std::size_t max_n) {
    const std::size_t n = 10 + rng.uniform_index(max_n - 10);
    std::vector<double> values;
    std::vector<ClassLabel> labels;
    const bool with_ties = rng.uniform01() < 0.5;
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < n; ++i) {
        values.push_back(with_ties ? std::floor(rng.uniform(0, 12)) : rng.normal(0, 1));
        const ClassLabel l = rng.uniform01() < 0.4 ? kNonSurvived : kSurvived;
        labels.push_back(l);
        (l == kSurvived ? has0 : has1) = true;
    }
    if (!has0) labels[0] = kSurvived;
    if (!has1) labels[1] = kNonSurvived;
    return {values, labels};
}

}  // namespace

TEST_CASE("classify: boundary values are inclusive exactly as written") {
    ThresholdRule one2{35, RuleKind::one, 2, 0.2, 0, 0};
    CHECK(one2.classify(0.2) == kNonSurvived);   // x >= v_th -> non-survived
    CHECK(one2.classify(0.1999) == kSurvived);
    ThresholdRule one1 = one2;
    one1.rule_type = 1;
    CHECK(one1.classify(0.2) == kSurvived);
    CHECK(one1.classify(0.1999) == kNonSurvived);

    ThresholdRule band2{35, RuleKind::two, 2, 0, 0.2, 5.2};
    CHECK(band2.classify(10.0) == kSurvived);   // outside the band
    CHECK(band2.classify(0.2) == kNonSurvived);  // inclusive lower bound
    CHECK(band2.classify(5.2) == kNonSurvived);  // inclusive upper bound
    CHECK(band2.classify(1.0) == kNonSurvived);
    ThresholdRule band1 = band2;
    band1.rule_type = 1;
    CHECK(band1.classify(1.0) == kSurvived);
    CHECK(band1.classify(10.0) == kNonSurvived);

    // degenerate rule below the data minimum sends everything to survived
    ThresholdRule low{1, RuleKind::one, 1, -1e9, 0, 0};
    for (const double x : {-5.0, 0.0, 3.0, 1e8}) CHECK(low.classify(x) == kSurvived);
}

TEST_CASE("search_one: separable four points") {
    const std::vector<double> values{1, 2, 3, 4};
    const std::vector<ClassLabel> labels{kSurvived, kSurvived, kNonSurvived, kNonSurvived};
    const auto res = search_one(values, labels);
    CHECK(res.rule.rule_type == 2);
    CHECK(res.rule.v_th == doctest::Approx(2.5));
    CHECK(res.a_th == doctest::Approx(1.0));
    CHECK(res.report.f1_squared == doctest::Approx(1.0));
}

TEST_CASE("search_two: interior band") {
    const std::vector<double> values{1, 2, 3, 4, 5};
    const std::vector<ClassLabel> labels{kSurvived, kNonSurvived, kNonSurvived, kNonSurvived,
                                         kSurvived};
    const auto res = search_two(values, labels);
    CHECK(res.rule.rule_type == 2);
    CHECK(res.rule.v_th1 == doctest::Approx(1.5));
    CHECK(res.rule.v_th2 == doctest::Approx(4.5));
    CHECK(res.a_th == doctest::Approx(1.0));
}

TEST_CASE("searches match the brute-force oracle") {
    Rng rng(50);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [values, labels] = random_dataset(rng, 120);
        const auto one = search_one(values, labels);
        CHECK(one.a_th == doctest::Approx(oracles::best_one_threshold(values, labels))
                              .epsilon(1e-12));
        const auto two = search_two(values, labels);
        CHECK(two.a_th == doctest::Approx(oracles::best_two_threshold(values, labels))
                              .epsilon(1e-12));
        // nesting: the band search can always emulate a single threshold
        CHECK(two.a_th >= one.a_th - 1e-15);
    }
}

TEST_CASE("label-swap duality") {
    Rng rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [values, labels] = random_dataset(rng, 80);
        std::vector<ClassLabel> flipped;
        for (const auto l : labels) flipped.push_back(l == kSurvived ? kNonSurvived : kSurvived);
        CHECK(search_one(values, labels).a_th ==
              doctest::Approx(search_one(values, flipped).a_th).epsilon(1e-12));
        CHECK(search_two(values, labels).a_th ==
              doctest::Approx(search_two(values, flipped).a_th).epsilon(1e-12));
    }
}

TEST_CASE("monotone transforms change thresholds, not quality") {
    Rng rng(52);
    for (int trial = 0; trial < 15; ++trial) {
        const auto [values, labels] = random_dataset(rng, 80);
        std::vector<double> warped;
        for (const double v : values) warped.push_back(std::exp(v * 0.5));
        const auto base = search_two(values, labels);
        const auto trans = search_two(warped, labels);
        CHECK(base.a_th == doctest::Approx(trans.a_th).epsilon(1e-9));
        // classification of each point is preserved
        for (std::size_t i = 0; i < values.size(); ++i) {
            CHECK(base.rule.classify(values[i]) == trans.rule.classify(warped[i]));
        }
    }
}

TEST_CASE("constant values with mixed labels degrade to the one-class rule") {
    const std::vector<double> values{3, 3, 3, 3};
    const std::vector<ClassLabel> labels{kSurvived, kNonSurvived, kSurvived, kNonSurvived};
    const auto res = search_one(values, labels);
    CHECK(res.a_th == doctest::Approx(0.5));
    const auto two = search_two(values, labels);
    CHECK(two.a_th == doctest::Approx(0.5));
}

TEST_CASE("snap-to-data reports observed values and preserves the partition") {
    // non-survived cluster sits in [0.2, 5.2], survived outside it
    const std::vector<double> values{0.05, 0.1, 0.19, 0.2, 1.3, 2.0, 5.2, 5.9, 8.0, 10.0};
    const std::vector<ClassLabel> labels{kSurvived,    kSurvived,    kSurvived,
                                         kNonSurvived, kNonSurvived, kNonSurvived,
                                         kNonSurvived, kSurvived,    kSurvived,
                                         kSurvived};
    const auto raw = search_two(values, labels, false);
    const auto snapped = search_two(values, labels, true);
    CHECK(raw.a_th == doctest::Approx(1.0));
    CHECK(snapped.a_th == doctest::Approx(raw.a_th));
    CHECK(snapped.rule.v_th1 == doctest::Approx(0.2));  // lower bound snaps up to data
    CHECK(snapped.rule.v_th2 == doctest::Approx(5.2));  // upper bound snaps down to data
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(raw.rule.classify(values[i]) == snapped.rule.classify(values[i]));
    }
    // one-threshold snap: the reported value is the smallest observed value
    // on the >= side of the cut
    const std::vector<double> v1{1, 2, 3, 4};
    const std::vector<ClassLabel> l1{kSurvived, kSurvived, kNonSurvived, kNonSurvived};
    const auto s1 = search_one(v1, l1, true);
    CHECK(s1.rule.v_th == doctest::Approx(3.0));
}

TEST_CASE("search_all balances, then searches every column") {
    Rng rng(53);
    FeatureTable t({1, 2}, 60);
    for (std::size_t i = 0; i < 60; ++i) {
        const bool positive = i >= 45;
        t.at(i, 0) = positive ? rng.uniform(5, 9) : rng.uniform(0, 4);
        t.at(i, 1) = rng.normal(0, 1);
        t.set_label(i, positive ? kNonSurvived : kSurvived);
    }
    ThresholdSearchOptions opt;
    opt.seed = 5;
    const auto results = search_all(t, RuleKind::one, opt);
    REQUIRE(results.size() == 2);
    CHECK(results[0].rule.feature_no == 1);
    CHECK(results[1].rule.feature_no == 2);
    CHECK(results[0].a_th == doctest::Approx(1.0));
    CHECK(results[0].report.f1_squared == doctest::Approx(1.0));
    CHECK(results[1].a_th < 0.75);

    // duplicated feature columns give identical results
    FeatureTable dup({1, 2}, 60);
    for (std::size_t i = 0; i < 60; ++i) {
        dup.at(i, 0) = t.at(i, 0);
        dup.at(i, 1) = t.at(i, 0);
        dup.set_label(i, t.label(i));
    }
    const auto dup_results = search_all(dup, RuleKind::two, opt);
    CHECK(dup_results[0].a_th == doctest::Approx(dup_results[1].a_th).epsilon(1e-12));
    CHECK(dup_results[0].rule.v_th1 == doctest::Approx(dup_results[1].rule.v_th1));

    // without balancing, a_th is still the balanced accuracy of the raw column
    ThresholdSearchOptions raw_opt;
    raw_opt.balance = false;
    const auto raw = search_all(t, RuleKind::one, raw_opt);
    CHECK(raw[0].a_th == doctest::Approx(1.0));
}
