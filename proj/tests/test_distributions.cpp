#include <doctest.h>

#include <cmath>
#include <numbers>

#include "divmdp/distributions.hpp"
#include "divmdp/math_util.hpp"
#include "divmdp/rng.hpp"

using namespace divmdp;

TEST_CASE("mass of the parametric kinds") {
    const auto z = CountableDistribution::zeta(2.0);
    CHECK(z.mass(1) == doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi))
                           .epsilon(1e-12));
    const auto f = CountableDistribution::finite({1.0});
    CHECK(f.mass(2) == 0.0);
    const auto g = CountableDistribution::geometric(0.5);
    CHECK(g.mass(3) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK_THROWS_AS(z.mass(0), std::invalid_argument);
}

TEST_CASE("finite weights: normalize benign rounding, reject real errors") {
    const auto d = CountableDistribution::finite({0.3 + 2e-10, 0.7});
    CHECK(d.mass(1) + d.mass(2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(CountableDistribution::finite({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(CountableDistribution::finite({0.9}), std::invalid_argument);
    CHECK_THROWS_AS(CountableDistribution::finite({1.2, -0.2}), std::invalid_argument);
    CHECK_THROWS_AS(CountableDistribution::finite({}), std::invalid_argument);
}

TEST_CASE("two-point perturbation") {
    const auto d = CountableDistribution::two_point_perturbed(0.25, 16);
    CHECK(d.mass(1) == 0.75);  // 1/2 + 1/(2*16^{1/4}) = 1/2 + 1/4
    CHECK(d.mass(1) + d.mass(2) == 1.0);
    CHECK(d.mass(3) == 0.0);
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{7}, std::uint64_t{100000}}) {
        const auto dn = CountableDistribution::two_point_perturbed(0.49, n);
        CHECK(dn.mass(1) + dn.mass(2) == 1.0);
    }
    CHECK_THROWS_AS(CountableDistribution::two_point_perturbed(0.5, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(CountableDistribution::two_point_perturbed(0.0, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(CountableDistribution::two_point_perturbed(-0.1, 10),
                    std::invalid_argument);
}

TEST_CASE("tail mass bounds") {
    const auto g = CountableDistribution::geometric(0.5);
    CHECK(g.tail_mass_bound(10) == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-13));

    const auto f = CountableDistribution::finite({0.4, 0.6});
    CHECK(f.tail_mass_bound(5) == 0.0);
    CHECK(f.tail_mass_bound(1) == doctest::Approx(0.6).epsilon(1e-15));

    const auto z = CountableDistribution::zeta(2.0);
    const double bound = z.tail_mass_bound(100);
    CHECK(bound == doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi * 100.0))
                       .epsilon(1e-12));
    // true tail (partial sum to 1e7 terms) stays below the bound
    KahanSum tail;
    for (std::uint64_t i = 10000000; i > 100; --i) tail.add(z.mass(i));
    CHECK(tail.value() <= bound);
    CHECK(tail.value() >= 0.95 * bound);  // integral bound is tight for s=2
    // monotone decreasing in N
    CHECK(z.tail_mass_bound(200) < z.tail_mass_bound(100));
    CHECK(g.tail_mass_bound(20) < g.tail_mass_bound(10));
}

TEST_CASE("power sum tail bounds") {
    const auto z = CountableDistribution::zeta(2.0);
    // sum_{i>N} p_i^2 with p_i = C/i^2: brute force against the bound
    KahanSum brute;
    for (std::uint64_t i = 100000; i > 50; --i) brute.add(std::pow(z.mass(i), 2.0));
    const double bound = z.power_sum_tail_bound(2.0, 50);
    CHECK(brute.value() <= bound);
    CHECK(bound < 1e-5);
    CHECK_THROWS_AS(z.power_sum_tail_bound(0.4, 100), std::domain_error);

    const auto g = CountableDistribution::geometric(0.25);
    KahanSum gb;
    for (std::uint64_t i = 2000; i > 30; --i) gb.add(std::pow(g.mass(i), 1.5));
    CHECK(gb.value() <= g.power_sum_tail_bound(1.5, 30));
    CHECK(gb.value() >= 0.5 * g.power_sum_tail_bound(1.5, 30));
}

TEST_CASE("sampling determinism and degenerate cases") {
    const auto z = CountableDistribution::zeta(2.0);
    auto e1 = make_engine(42, 0, 0);
    auto e2 = make_engine(42, 0, 0);
    const auto s1 = z.sample_counts(5000, e1);
    const auto s2 = z.sample_counts(5000, e2);
    CHECK(s1.counts == s2.counts);
    CHECK(s1.n == 5000);

    const auto point = CountableDistribution::finite({1.0, 0.0});
    auto e3 = make_engine(7);
    const auto s3 = point.sample_counts(100, e3);
    REQUIRE(s3.counts.size() == 1);
    CHECK(s3.counts[0].first == 1);
    CHECK(s3.counts[0].second == 100);

    auto e4 = make_engine(9);
    const auto s4 = z.sample_counts(1, e4);
    std::uint64_t total = 0;
    for (const auto& [letter, count] : s4.counts) total += count;
    CHECK(total == 1);
    CHECK(s4.counts.size() == 1);

    CHECK_THROWS_AS(z.sample_counts(0, e4), std::invalid_argument);
}

TEST_CASE("letter-1 frequency of a large geometric sample") {
    const auto g = CountableDistribution::geometric(0.5);
    auto eng = make_engine(2024);
    const auto s = g.sample_counts(1000000, eng);
    const double freq = s.p_hat(1);
    CHECK(freq > 0.5 - 0.002);  // 4 sigma binomial band
    CHECK(freq < 0.5 + 0.002);
}

TEST_CASE("empirical frequencies converge within binomial bands") {
    const auto z = CountableDistribution::zeta(2.0);
    const std::uint64_t n = 1000;
    const std::uint64_t reps = 200;
    std::vector<std::uint64_t> totals(4, 0);
    for (std::uint64_t r = 0; r < reps; ++r) {
        auto eng = make_engine(5150, 0, r);
        const auto s = z.sample_counts(n, eng);
        for (std::uint64_t i = 1; i <= 4; ++i) {
            totals[i - 1] += static_cast<std::uint64_t>(s.p_hat(i) * n + 0.5);
        }
    }
    const double draws = static_cast<double>(n * reps);
    for (std::uint64_t i = 1; i <= 4; ++i) {
        const double p = z.mass(i);
        const double freq = totals[i - 1] / draws;
        const double band = 4.0 * std::sqrt(p * (1.0 - p) / draws);
        CHECK(std::fabs(freq - p) <= band);
    }
}

TEST_CASE("prefix cache invariants") {
    // light tail keeps the lazy extension well inside the cache cap
    const auto g = CountableDistribution::geometric(0.01);
    g.prepare(100);
    const auto before = g.cached_cdf();
    REQUIRE(!before.empty());
    for (std::size_t i = 1; i < before.size(); ++i) CHECK(before[i] >= before[i - 1]);
    CHECK(before.back() <= 1.0);

    g.prepare(100000000);  // force extension
    const auto after = g.cached_cdf();
    REQUIRE(after.size() > before.size());
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] == before[i]);
    CHECK(after.back() <= 1.0);
    CHECK(after.back() > before.back());
}

TEST_CASE("cache prefix sums agree with the analytic tail continuation") {
    // the inversion past the cache uses zeta(s, m+1); the two routes to the
    // CDF must coincide to rounding
    const auto z = CountableDistribution::zeta(2.0);
    z.prepare(1 << 22);
    const auto cdf = z.cached_cdf();
    REQUIRE(cdf.size() >= 5000);
    for (std::size_t m : {std::size_t{100}, std::size_t{1000}, std::size_t{5000}}) {
        const double analytic = 1.0 - hurwitz_zeta(2.0, static_cast<double>(m) + 1.0) /
                                          zeta(2.0);
        CHECK(cdf[m - 1] == doctest::Approx(analytic).epsilon(1e-12));
    }
}

TEST_CASE("custom distributions") {
    // p_i = 2^{-i} with the exact tail 2^{-N}
    auto mass = [](std::uint64_t i) { return std::pow(2.0, -static_cast<double>(i)); };
    auto tail = [](std::uint64_t n) { return std::pow(2.0, -static_cast<double>(n)); };
    const auto d = CountableDistribution::custom(mass, 0, tail);
    CHECK(d.mass(3) == 0.125);
    CHECK(d.tail_mass_bound(4) == doctest::Approx(0.0625).epsilon(1e-15));
    auto e1 = make_engine(77);
    auto e2 = make_engine(77);
    CHECK(d.sample_counts(2000, e1).counts == d.sample_counts(2000, e2).counts);

    const auto no_tail = CountableDistribution::custom(mass);
    CHECK_THROWS_AS(no_tail.tail_mass_bound(4), std::domain_error);
}

TEST_CASE("triangular families") {
    const auto tp = TriangularFamily::two_point(0.25);
    CHECK(tp.at(16).mass(1) == 0.75);
    CHECK_FALSE(tp.is_fixed());

    const auto geo = TriangularFamily::geometric_decay(0.5);
    CHECK(geo.at(4).geometric_q() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(geo.at(1), std::invalid_argument);

    const auto fixed = TriangularFamily::fixed(CountableDistribution::zeta(2.0));
    CHECK(fixed.is_fixed());
    CHECK(fixed.at(10).zeta_exponent() == 2.0);
    CHECK_THROWS_AS(TriangularFamily::two_point(0.6), std::invalid_argument);
    CHECK_THROWS_AS(TriangularFamily::geometric_decay(1.0), std::invalid_argument);
}
