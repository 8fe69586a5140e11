#include <doctest.h>

#include <cmath>

#include "divmdp/estimation.hpp"
#include "divmdp/montecarlo.hpp"

using namespace divmdp;

namespace {

ExperimentConfig tiny_config() {
    return ExperimentConfig{TriangularFamily::fixed(CountableDistribution::zeta(2.0)),
                            IndexFamily::simpson(),
                            {200, 400},
                            300,
                            {1.0},
                            MdpScaleSpec::power(1.0, 0.1),
                            91,
                            1e-9,
                            1};
}

}  // namespace

TEST_CASE("exact plug-in distribution on hand-enumerable cases") {
    const auto uniform2 = CountableDistribution::finite({0.5, 0.5});
    const auto dist = exact_plugin_distribution(uniform2, IndexFamily::simpson(), 2);
    REQUIRE(dist.size() == 2);
    CHECK(dist[0].first == 0.5);
    CHECK(dist[0].second == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dist[1].first == 1.0);
    CHECK(dist[1].second == doctest::Approx(0.5).epsilon(1e-15));

    const auto point = CountableDistribution::finite({1.0});
    const auto pd = exact_plugin_distribution(point, IndexFamily::simpson(), 7);
    REQUIRE(pd.size() == 1);
    CHECK(pd[0].first == 1.0);
    CHECK(pd[0].second == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exact plug-in distribution normalizes and respects limits") {
    const auto d3 = CountableDistribution::finite({0.6, 0.3, 0.1});
    const auto dist = exact_plugin_distribution(d3, IndexFamily::simpson(), 12);
    double total = 0.0;
    for (const auto& [value, prob] : dist) {
        CHECK(prob >= 0.0);
        total += prob;
    }
    CHECK(std::fabs(total - 1.0) < 1e-12);

    const auto d4 = CountableDistribution::finite({0.4, 0.3, 0.2, 0.1});
    const auto dist4 = exact_plugin_distribution(d4, IndexFamily::tsallis(2.0), 10);
    double total4 = 0.0;
    for (const auto& [value, prob] : dist4) total4 += prob;
    CHECK(std::fabs(total4 - 1.0) < 1e-12);

    const auto d5 = CountableDistribution::finite({0.2, 0.2, 0.2, 0.2, 0.2});
    CHECK_THROWS_AS(exact_plugin_distribution(d5, IndexFamily::simpson(), 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(exact_plugin_distribution(d3, IndexFamily::simpson(), 13),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        exact_plugin_distribution(CountableDistribution::zeta(2.0),
                                  IndexFamily::simpson(), 5),
        std::invalid_argument);
}

TEST_CASE("exact mean matches the binomial-moment closed form") {
    // for Simpson, E[theta_hat] = sum_i (p_i^2 + p_i (1-p_i)/n)
    const auto d = CountableDistribution::finite({0.6, 0.3, 0.1});
    for (std::uint64_t n : {std::uint64_t{5}, std::uint64_t{8}, std::uint64_t{12}}) {
        const auto dist = exact_plugin_distribution(d, IndexFamily::simpson(), n);
        double mean = 0.0;
        for (const auto& [value, prob] : dist) mean += value * prob;
        double expected = 0.0;
        for (std::uint64_t i = 1; i <= 3; ++i) {
            const double p = d.mass(i);
            expected += p * p + p * (1.0 - p) / static_cast<double>(n);
        }
        CHECK(std::fabs(mean - expected) < 1e-12);

        // the Tsallis transform is affine in h, so the identity transfers
        const auto td = exact_plugin_distribution(d, IndexFamily::tsallis(2.0), n);
        double tmean = 0.0;
        for (const auto& [value, prob] : td) tmean += value * prob;
        CHECK(std::fabs(tmean - (expected - 1.0) / (1.0 - 2.0)) < 1e-12);
    }
}

TEST_CASE("Monte Carlo tail frequencies match the exact enumeration") {
    struct Case {
        CountableDistribution dist;
        IndexFamily family;
    };
    const Case cases[] = {
        {CountableDistribution::finite({0.6, 0.3, 0.1}), IndexFamily::simpson()},
        {CountableDistribution::finite({0.5, 0.3, 0.2}), IndexFamily::simpson()},
        {CountableDistribution::finite({0.6, 0.3, 0.1}), IndexFamily::tsallis(2.0)},
    };
    const std::uint64_t n = 8;
    const std::uint64_t reps = 1000000;
    for (const auto& c : cases) {
        const double theta_pop = theta(c.family, c.dist, 1e-12);
        const auto exact = exact_plugin_distribution(c.dist, c.family, n);

        // 20 thresholds spread over the deviation range, each kept clear of
        // the atoms so both routes classify every outcome identically
        std::vector<double> devs;
        for (const auto& [value, prob] : exact) devs.push_back(std::fabs(value - theta_pop));
        std::sort(devs.begin(), devs.end());
        const double dmax = devs.back();
        std::vector<double> thresholds;
        for (int k = 0; k < 20; ++k) {
            double t = dmax * (k + 0.6180339887) / 20.6;
            for (double d : devs) {
                if (std::fabs(t - d) < 1e-9) t += 2e-9;
            }
            thresholds.push_back(t);
        }
        REQUIRE(thresholds.size() == 20);

        const auto sums = replicate_sums(c.dist, c.family, n, reps, 777, 0, 1, false);
        for (const double t : thresholds) {
            double p_exact = 0.0;
            for (const auto& [value, prob] : exact) {
                if (std::fabs(value - theta_pop) > t) p_exact += prob;
            }
            std::uint64_t hits = 0;
            for (double base : sums.base) {
                if (std::fabs(apply_transform(c.family, base) - theta_pop) > t) ++hits;
            }
            const double p_mc = static_cast<double>(hits) / static_cast<double>(reps);
            const double band =
                4.0 * std::sqrt(p_exact * (1.0 - p_exact) / static_cast<double>(reps));
            CHECK(std::fabs(p_mc - p_exact) <= band + 1e-9);
        }
    }
}

TEST_CASE("replicate sums are deterministic per stream") {
    const auto dist = CountableDistribution::zeta(2.0);
    const auto a = replicate_sums(dist, IndexFamily::simpson(), 500, 50, 11, 3, 1, false);
    const auto b = replicate_sums(dist, IndexFamily::simpson(), 500, 50, 11, 3, 1, false);
    CHECK(a.base == b.base);
    const auto c = replicate_sums(dist, IndexFamily::simpson(), 500, 50, 11, 4, 1, false);
    CHECK(a.base != c.base);
    const auto d = replicate_sums(dist, IndexFamily::simpson(), 500, 50, 12, 3, 1, false);
    CHECK(a.base != d.base);
}

TEST_CASE("worker count never changes the results") {
    const auto cfg1 = tiny_config();
    auto cfg4 = tiny_config();
    cfg4.threads = 4;
    const auto r1 = run_experiment(cfg1);
    const auto r4 = run_experiment(cfg4);
    REQUIRE(r1.points.size() == r4.points.size());
    for (std::size_t i = 0; i < r1.points.size(); ++i) {
        CHECK(r1.points[i].hits == r4.points[i].hits);
        CHECK(r1.points[i].p_hat == r4.points[i].p_hat);
        CHECK(r1.points[i].l_hat == r4.points[i].l_hat);
        CHECK(r1.points[i].se == r4.points[i].se);
    }
    const auto s1 = run_simulation(cfg1);
    const auto s4 = run_simulation(cfg4);
    REQUIRE(s1.size() == s4.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].mean_theta_hat == s4[i].mean_theta_hat);
        CHECK(s1[i].sd_theta_hat == s4[i].sd_theta_hat);
        CHECK(s1[i].ks == s4[i].ks);
    }
}

TEST_CASE("rate experiment validates its inputs") {
    auto cfg = tiny_config();
    cfg.replicates = 50;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.r_grid = {};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.r_grid = {-1.0};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    // a point mass has sigma_n = 0: the scale precondition fails outright
    cfg = tiny_config();
    cfg.dists = TriangularFamily::fixed(CountableDistribution::finite({1.0}));
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("zero hits are censored with the log(1/R) bound") {
    auto cfg = tiny_config();
    cfg.r_grid = {50.0};  // far beyond any reachable deviation
    const auto curve = run_experiment(cfg);
    for (const auto& p : curve.points) {
        CHECK(p.censored);
        CHECK(p.hits == 0);
        CHECK(p.p_hat == 0.0);
        CHECK(p.l_hat ==
              doctest::Approx(std::log(1.0 / static_cast<double>(cfg.replicates)) /
                              (p.b_n * p.b_n))
                  .epsilon(1e-15));
        CHECK(p.se == 0.0);
    }
}

TEST_CASE("clt diagnostic approaches the normal limit") {
    const auto zeta2 = CountableDistribution::zeta(2.0);
    const double ks =
        clt_diagnostic(zeta2, IndexFamily::simpson(), 20000, 1500, 99, false, 1);
    CHECK(ks < 0.05);
    CHECK_THROWS_AS(clt_diagnostic(CountableDistribution::finite({0.5, 0.5}),
                                   IndexFamily::simpson(), 100, 100, 1),
                    std::domain_error);
}

TEST_CASE("studentizing barely moves the CLT diagnostic at scale") {
    const auto zeta2 = CountableDistribution::zeta(2.0);
    const double ks =
        clt_diagnostic(zeta2, IndexFamily::simpson(), 100000, 1000, 99, false, 1);
    const double ks_stud =
        clt_diagnostic(zeta2, IndexFamily::simpson(), 100000, 1000, 99, true, 1);
    CHECK(std::fabs(ks - ks_stud) < 0.01);
}

TEST_CASE("transform remainder obeys the Lagrange bound") {
    // |T(h_hat) - T(h) - T'(h)(h_hat - h)| <= max|T''| (h_hat - h)^2 / 2
    for (const IndexFamily& f : {IndexFamily::renyi(2.0), IndexFamily::hill(2.0)}) {
        for (double h : {0.2, 0.4, 0.8}) {
            for (double h_hat : {0.11, 0.35, 0.52, 0.97}) {
                const double rem = apply_transform(f, h_hat) - apply_transform(f, h) -
                                   transform_derivative(f, h) * (h_hat - h);
                const double lo = std::min(h, h_hat);
                const double hi = std::max(h, h_hat);
                const double t2 = std::max(
                    std::fabs(transform_second_derivative(f, lo)),
                    std::fabs(transform_second_derivative(f, hi)));
                CHECK(std::fabs(rem) <= 0.5 * t2 * (h_hat - h) * (h_hat - h) + 1e-15);
            }
        }
    }
}

TEST_CASE("remainder diagnostic basics") {
    const auto geo = CountableDistribution::geometric(0.4);
    const auto scale = MdpScaleSpec::power(1.0, 0.1);
    const auto rep = remainder_diagnostic(geo, IndexFamily::renyi(2.0), 2000, 300, 5,
                                          scale, 1e-10, 1);
    CHECK(rep.mean_scaled >= 0.0);
    CHECK(rep.max_scaled >= rep.mean_scaled);
    CHECK(rep.mean_scaled < 1.0);
    CHECK_THROWS_AS(remainder_diagnostic(geo, IndexFamily::simpson(), 100, 100, 5,
                                         scale, 1e-10, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(remainder_diagnostic(geo, IndexFamily::tsallis(2.0), 100, 100, 5,
                                         scale, 1e-10, 1),
                    std::invalid_argument);
}
