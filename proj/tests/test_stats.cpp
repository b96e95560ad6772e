#include <doctest.h>

#include "coverage_ph/error.hpp"
#include "coverage_ph/stats.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace coverage_ph;

namespace {

Sample sample(std::vector<double> v) { return Sample{"s", std::move(v), false}; }

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

} // namespace

TEST_CASE("trim_short_deaths") {
    std::vector<double> d{10, 15, 16, 200};
    CHECK(trim_short_deaths(d).values == std::vector<double>{16, 200});
    std::vector<double> small{1, 15, 15};
    CHECK_THROWS_WITH_AS(trim_short_deaths(small), "no observations above threshold", ValidationError);
    std::vector<double> pos{3, 1, 2};
    CHECK(trim_short_deaths(pos, 0.0).values == pos);
}

TEST_CASE("log_transform") {
    CHECK(log_transform(sample({1.0})).values[0] == 0.0);
    CHECK(log_transform(sample({std::numbers::e})).values[0] == doctest::Approx(1.0).epsilon(1e-12));
    auto logged = log_transform(sample({2, 5, 100}));
    CHECK(logged.log_scale);
    CHECK(std::is_sorted(logged.values.begin(), logged.values.end()));
    CHECK_THROWS_AS(log_transform(sample({1, 0})), ValidationError);
}

TEST_CASE("rank_with_ties") {
    std::vector<double> tie{5, 5};
    CHECK(rank_with_ties(tie) == std::vector<double>{1.5, 1.5});
    std::vector<double> inc{1, 2, 3, 4};
    CHECK(rank_with_ties(inc) == std::vector<double>{1, 2, 3, 4});
    std::vector<double> mixed{3, 1, 3, 2, 3};
    CHECK(rank_with_ties(mixed) == std::vector<double>{4, 1, 4, 2, 4});

    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> val(0, 20);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + trial * 3);
        for (auto& x : v) x = val(rng);
        auto r = rank_with_ties(v);
        const double m = static_cast<double>(v.size());
        CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(m * (m + 1) / 2).epsilon(1e-12));
    }
}

TEST_CASE("Mann-Whitney exact path") {
    auto r = mann_whitney_one_sided(sample({1, 2}), sample({3, 4}), Alternative::Less);
    CHECK(r.exact);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_one_tailed == 1.0 / 6.0);

    auto counts = mann_whitney_null_counts(2, 2);
    CHECK(counts == std::vector<double>{1, 1, 2, 1, 1});

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t na = 2 + trial % 7, nb = 2 + (trial * 5) % 9;
        auto a = draw(rng, na, 0, 100), b = draw(rng, nb, 10, 110);
        for (auto alt : {Alternative::Less, Alternative::Greater}) {
            auto res = mann_whitney_one_sided(sample(a), sample(b), alt);
            CHECK(res.exact);
            CHECK(res.p_one_tailed == doctest::Approx(oracle::mann_whitney_enumerated(a, b, alt == Alternative::Less)).epsilon(1e-14));
        }
    }
}

TEST_CASE("Mann-Whitney normal approximation") {
    std::vector<double> v(30);
    std::iota(v.begin(), v.end(), 1.0);
    auto same = mann_whitney_one_sided(sample(v), sample(v));
    CHECK_FALSE(same.exact);
    CHECK(same.p_one_tailed == doctest::Approx(0.5).epsilon(0.04));
    CHECK(std::abs(same.p_one_tailed - 0.5) <= 0.02);

    // reference values from an established statistics package (tie-corrected,
    // continuity-corrected normal approximation)
    std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10.5};
    std::vector<double> b{4, 6, 8, 10, 12, 14, 16, 18, 20, 22};
    auto r = mann_whitney_one_sided(sample(a), sample(b), Alternative::Less);
    CHECK(r.statistic == 14.5);
    CHECK(r.p_one_tailed == doctest::Approx(0.004039619482697207).epsilon(1e-10));

    CHECK_THROWS_AS(mann_whitney_one_sided(sample({1}), sample({2, 3})), ValidationError);
    auto flat = mann_whitney_one_sided(sample({4, 4, 4}), sample({4, 4}));
    CHECK(flat.p_one_tailed == 1.0);
}

TEST_CASE("Mann-Whitney label symmetry") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t na = 3 + trial % 20, nb = 4 + trial % 13;
        auto a = draw(rng, na, 0, 100), b = draw(rng, nb, 5, 120);
        auto ab = mann_whitney_one_sided(sample(a), sample(b), Alternative::Less);
        auto ba = mann_whitney_one_sided(sample(b), sample(a), Alternative::Greater);
        CHECK(ab.p_one_tailed == doctest::Approx(ba.p_one_tailed).epsilon(1e-12));
    }
}

TEST_CASE("Brunner-Munzel") {
    std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10.5};
    std::vector<double> b{4, 6, 8, 10, 12, 14, 16, 18, 20, 22};
    auto r = brunner_munzel_one_sided(sample(a), sample(b), Alternative::Less);
    CHECK(r.statistic == doctest::Approx(4.131446327675698).epsilon(1e-12));
    CHECK(r.p_one_tailed == doctest::Approx(0.0004568343998574422).epsilon(1e-9));
    auto g = brunner_munzel_one_sided(sample(a), sample(b), Alternative::Greater);
    CHECK(g.p_one_tailed == doctest::Approx(1.0 - 0.0004568343998574422).epsilon(1e-12));

    std::mt19937_64 rng(37);
    auto same = draw(rng, 40, 0, 10);
    auto s = brunner_munzel_one_sided(sample(same), sample(same));
    CHECK(s.p_one_tailed == doctest::Approx(0.5).epsilon(1e-12));

    auto low = draw(rng, 15, 0, 10), high = draw(rng, 15, 100, 110);
    auto sep = brunner_munzel_one_sided(sample(low), sample(high));
    CHECK(sep.p_one_tailed < 0.001);
    CHECK(brunner_munzel_one_sided(sample(high), sample(low)).p_one_tailed > 0.999);

    CHECK_THROWS_WITH_AS(brunner_munzel_one_sided(sample({3, 3, 3}), sample({3, 3})), "degenerate ranks",
                         ValidationError);
    CHECK(brunner_munzel_one_sided(sample({1, 2, 3}), sample({2, 5, 6})).small_sample);

    for (int trial = 0; trial < 50; ++trial) {
        auto x = draw(rng, 15, 0, 100), y = draw(rng, 15, 20, 140);
        auto res = brunner_munzel_one_sided(sample(x), sample(y));
        CHECK(res.statistic == doctest::Approx(oracle::brunner_munzel_placements(x, y)).epsilon(1e-12));
        CHECK(res.p_one_tailed >= 0.0);
        CHECK(res.p_one_tailed <= 1.0);
    }
}

TEST_CASE("rank tests ignore monotone transforms") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = draw(rng, 5 + trial, 16, 400), b = draw(rng, 8 + trial % 5, 16, 500);
        auto la = log_transform(sample(a)), lb = log_transform(sample(b));
        CHECK(mann_whitney_one_sided(sample(a), sample(b)).p_one_tailed ==
              mann_whitney_one_sided(la, lb).p_one_tailed);
        CHECK(brunner_munzel_one_sided(sample(a), sample(b)).p_one_tailed ==
              brunner_munzel_one_sided(la, lb).p_one_tailed);
    }
}
