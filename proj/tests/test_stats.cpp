#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rbv/rng.hpp"
#include "rbv/stats.hpp"

using namespace rbv;

namespace {

// The reference p-values below were computed with an independent statistical
// library on exactly these draws, which regenerate bit-identically from the
// pinned generator.
std::vector<double> reference_normal_sample() {
    Rng rng(12345);
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(rng.normal());
    return v;
}

std::vector<double> reference_lognormal_sample() {
    Rng rng(12345);
    for (int i = 0; i < 50; ++i) rng.normal();  // skip the normal block
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(std::exp(rng.normal()));
    return v;
}

FeatureTable two_class_table(const std::vector<std::vector<double>>& surv_cols,
                             const std::vector<std::vector<double>>& non_cols,
                             std::vector<int> features) {
    const std::size_t n0 = surv_cols[0].size();
    const std::size_t n1 = non_cols[0].size();
    FeatureTable t(std::move(features), n0 + n1);
    for (std::size_t c = 0; c < surv_cols.size(); ++c) {
        for (std::size_t r = 0; r < n0; ++r) t.at(r, c) = surv_cols[c][r];
        for (std::size_t r = 0; r < n1; ++r) t.at(n0 + r, c) = non_cols[c][r];
    }
    for (std::size_t r = 0; r < n1; ++r) t.set_label(n0 + r, kNonSurvived);
    return t;
}

}  // namespace

TEST_CASE("describe: exact quartiles of five points") {
    const auto t = two_class_table({{1, 2, 3, 4, 5}}, {{7, 7}}, {1});
    const auto q = describe(t, 1);
    CHECK(q.survived.median == 3.0);
    CHECK(q.survived.q25 == 2.0);
    CHECK(q.survived.q75 == 4.0);
    CHECK(q.non_survived.median == 7.0);
    CHECK(q.non_survived.q25 == 7.0);
    CHECK(q.non_survived.q75 == 7.0);
}

TEST_CASE("describe rejects an empty class") {
    FeatureTable t({1}, 3);
    for (std::size_t r = 0; r < 3; ++r) t.at(r, 0) = double(r);
    CHECK_THROWS(describe(t, 1));
}

TEST_CASE("shapiro-wilk agrees with the reference implementation") {
    const auto sw_norm = shapiro_wilk(reference_normal_sample());
    CHECK(sw_norm.statistic == doctest::Approx(0.9818453774968061).epsilon(1e-7));
    CHECK(sw_norm.p_value == doctest::Approx(0.6319710999704238).epsilon(1e-5));
    CHECK(sw_norm.p_value > 0.05);  // normal draws: normality not rejected

    const auto sw_log = shapiro_wilk(reference_lognormal_sample());
    CHECK(sw_log.statistic == doctest::Approx(0.7748328068458213).epsilon(1e-7));
    CHECK(sw_log.p_value == doctest::Approx(2.417949796313947e-07).epsilon(1e-3));
    CHECK(sw_log.p_value < 0.05);  // exp(normal) draws: normality rejected

    const std::vector<double> small{1.0, 2.1, 3.3, 2.2, 5.1, 0.3, 2.9};
    const auto sw_small = shapiro_wilk(small);
    CHECK(sw_small.statistic == doctest::Approx(0.9728732119660977).epsilon(1e-7));
    CHECK(sw_small.p_value == doctest::Approx(0.918342869922169).epsilon(1e-5));
}

TEST_CASE("shapiro-wilk bounds and errors") {
    const std::vector<double> three{1.0, 2.0, 3.0};
    const auto res = shapiro_wilk(three);
    CHECK(res.statistic > 0.0);
    CHECK(res.statistic <= 1.0);
    CHECK_THROWS(shapiro_wilk(std::vector<double>{1.0, 2.0}));
    CHECK_THROWS(shapiro_wilk(std::vector<double>{5.0, 5.0, 5.0, 5.0}));
    CHECK_THROWS(shapiro_wilk(std::vector<double>(5001, 1.0)));
}

TEST_CASE("levene agrees with the reference implementation") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> b{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    const auto res = levene(a, b);
    CHECK(res.statistic == doctest::Approx(5.625).epsilon(1e-12));
    CHECK(res.p_value == doctest::Approx(0.029063451986863338).epsilon(1e-9));
}

TEST_CASE("levene trivial and degenerate cases") {
    // identical values shifted by a constant: equal spreads
    const std::vector<double> a{1, 2, 3, 4};
    std::vector<double> b;
    for (const double v : a) b.push_back(v + 10.0);
    const auto res = levene(a, b);
    CHECK(res.statistic == doctest::Approx(0.0));
    CHECK(res.p_value == doctest::Approx(1.0));

    // sample vs itself
    const auto self = levene(a, a);
    CHECK(self.statistic == doctest::Approx(0.0));

    // constant vs alternating, scaled n: deviations are group-constant but
    // differ, so the spread difference is unambiguous
    std::vector<double> ones(40, 1.0), alt;
    for (int i = 0; i < 20; ++i) {
        alt.push_back(0.0);
        alt.push_back(10.0);
    }
    const auto strong = levene(ones, alt);
    CHECK(strong.p_value < 0.05);

    CHECK_THROWS(levene(std::vector<double>{1, 1, 1}, std::vector<double>{2, 2}));
    CHECK_THROWS(levene(std::vector<double>{1}, std::vector<double>{2, 3}));
}

TEST_CASE("mann-whitney: identical samples") {
    const std::vector<double> s{1, 2, 3};
    const auto res = mann_whitney(s, s);
    CHECK(res.statistic == doctest::Approx(4.5));  // n1*n2/2
    CHECK(res.p_value == doctest::Approx(1.0));
}

TEST_CASE("mann-whitney: fully separated tiny samples, exact p") {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{10, 20, 30};
    const auto res = mann_whitney(a, b);
    CHECK(res.statistic == doctest::Approx(0.0));
    CHECK(res.p_value == doctest::Approx(0.1).epsilon(1e-12));
    const auto mirror = mann_whitney(b, a);
    CHECK(mirror.statistic == doctest::Approx(9.0));
    CHECK(mirror.p_value == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("mann-whitney exact path matches full enumeration") {
    Rng rng(88);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n1 = 1 + rng.uniform_index(5);
        const std::size_t n2 = 1 + rng.uniform_index(5);
        std::vector<double> a, b;
        // distinct values guarantee the tie-free exact path
        std::vector<double> pool;
        for (std::size_t i = 0; i < n1 + n2; ++i) pool.push_back(double(i) + rng.uniform01() * 0.5);
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.uniform_index(i)]);
        a.assign(pool.begin(), pool.begin() + std::ptrdiff_t(n1));
        b.assign(pool.begin() + std::ptrdiff_t(n1), pool.end());
        const auto res = mann_whitney(a, b);
        const double oracle = oracles::exact_mw_p_enumerated(a, b);
        CHECK(res.p_value == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("mann-whitney asymptotic reference value with ties") {
    Rng rng(99);
    std::vector<double> c, d;
    for (int i = 0; i < 30; ++i) c.push_back(std::floor(rng.uniform(0, 20)));
    for (int i = 0; i < 25; ++i) d.push_back(std::floor(rng.uniform(5, 25)));
    const auto res = mann_whitney(c, d);
    CHECK(res.statistic == doctest::Approx(209.0));
    CHECK(res.p_value == doctest::Approx(0.00505456794467333).epsilon(1e-9));
}

TEST_CASE("mann-whitney rank-sum identity U + U' = n1*n2") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n1 = 2 + rng.uniform_index(30);
        const std::size_t n2 = 2 + rng.uniform_index(30);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n1; ++i) a.push_back(std::floor(rng.uniform(0, 15)));
        for (std::size_t i = 0; i < n2; ++i) b.push_back(std::floor(rng.uniform(0, 15)));
        const auto u1 = mann_whitney(a, b).statistic;
        const auto u2 = mann_whitney(b, a).statistic;
        CHECK(u1 + u2 == doctest::Approx(double(n1 * n2)).epsilon(1e-12));
    }
}

TEST_CASE("mann-whitney p is invariant under strictly increasing transforms") {
    Rng rng(201);
    std::vector<double> a, b;
    for (int i = 0; i < 40; ++i) a.push_back(rng.normal(0, 1));
    for (int i = 0; i < 35; ++i) b.push_back(rng.normal(0.8, 1.3));
    const double base = mann_whitney(a, b).p_value;
    auto transform = [](std::vector<double> v, auto f) {
        for (double& x : v) x = f(x);
        return v;
    };
    const auto exp_f = [](double x) { return std::exp(x); };
    const auto cube = [](double x) { return x * x * x; };
    CHECK(mann_whitney(transform(a, exp_f), transform(b, exp_f)).p_value ==
          doctest::Approx(base).epsilon(1e-9));
    CHECK(mann_whitney(transform(a, cube), transform(b, cube)).p_value ==
          doctest::Approx(base).epsilon(1e-9));
    CHECK_THROWS(mann_whitney({}, b));
}

TEST_CASE("select_features: alpha edge cases and monotonicity") {
    // disjoint classes in every feature: everything is significant
    const auto disjoint = two_class_table({{1, 2, 3, 4}, {10, 11, 12, 13}},
                                          {{100, 101, 102, 103}, {200, 201, 202, 203}}, {1, 2});
    const auto all = select_features(disjoint, 0.05);
    CHECK(all == std::vector<int>{1, 2});
    // exact p for disjoint 4v4 is 2/70
    const std::size_t c0 = disjoint.col_of(1);
    const auto p = mann_whitney(disjoint.class_column(c0, kSurvived),
                                disjoint.class_column(c0, kNonSurvived))
                       .p_value;
    CHECK(p == doctest::Approx(2.0 / 70.0).epsilon(1e-12));

    CHECK(select_features(disjoint, 0.0).empty());

    // monotone in alpha on noisy data
    Rng rng(55);
    std::vector<std::vector<double>> surv(5), non(5);
    for (int c = 0; c < 5; ++c) {
        for (int r = 0; r < 60; ++r) surv[c].push_back(rng.normal(0, 1));
        for (int r = 0; r < 25; ++r) non[c].push_back(rng.normal(0.2 * c, 1));
    }
    const auto noisy = two_class_table(surv, non, {1, 2, 3, 4, 5});
    const auto loose = select_features(noisy, 0.2);
    const auto strict = select_features(noisy, 0.01);
    CHECK(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
}
