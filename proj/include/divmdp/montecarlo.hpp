#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "divmdp/distributions.hpp"
#include "divmdp/indices.hpp"
#include "divmdp/mdp.hpp"

namespace divmdp {

struct ExperimentConfig {
    TriangularFamily dists;
    IndexFamily family;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replicates = 0;
    std::vector<double> r_grid;
    MdpScaleSpec scale;
    std::uint64_t master_seed = 0;
    double tol = 1e-10;
    unsigned threads = 1;
};

struct RatePoint {
    std::uint64_t n;
    double b_n;
    double r;
    std::uint64_t hits;
    double p_hat;
    double l_hat;   // log(p_hat)/b_n^2; the censoring bound log(1/R)/b_n^2 on zero hits
    double se;      // delta-method standard error; 0 when censored
    bool censored;
};

struct RateCurve {
    std::uint64_t replicates = 0;
    std::vector<RatePoint> points;
};

// Empirical moderate-deviation rate curve. Per n: R independent samples,
// per-replicate plug-in estimates, hit counts of the tail event
// {sqrt(n)/(b_n sigma_n) |theta_hat - theta_n| > r} for each r. Replicate
// j of grid point i draws from the stream (master_seed, i, j), so the
// curve is bit-identical for any worker count.
RateCurve run_experiment(const ExperimentConfig& cfg);

struct SimulationRow {
    std::uint64_t n;
    double b_n;
    double theta_n;
    double sigma_n;
    double mean_theta_hat;
    double sd_theta_hat;
    double ks;  // KS distance of sqrt(n)(theta_hat - theta_n)/sigma_n to N(0,1)
};

// Per-n sampling diagnostics over the same replicate streams as
// run_experiment: mean/sd of theta_hat and the KS distance to the normal
// limit.
std::vector<SimulationRow> run_simulation(const ExperimentConfig& cfg);

// Exact distribution of the plug-in estimator by composition enumeration:
// (value, probability) pairs sorted by value, probabilities summing to 1.
// Requires a finite support of at most 4 letters and n <= 12.
std::vector<std::pair<double, double>> exact_plugin_distribution(
    const CountableDistribution& dist, const IndexFamily& family, std::uint64_t n);

// KS distance of Z_j = sqrt(n)(theta_hat_j - theta)/sigma to the standard
// normal over R replicates; `studentized` swaps sigma for the per-replicate
// plug-in estimate.
double clt_diagnostic(const CountableDistribution& dist, const IndexFamily& family,
                      std::uint64_t n, std::uint64_t replicates, std::uint64_t seed,
                      bool studentized = false, unsigned threads = 1,
                      double tol = 1e-10);

struct RemainderReport {
    double mean_scaled;
    double max_scaled;
};

// Scaled Taylor remainder sqrt(n)/b_n |T(h_hat) - T(h) - T'(h)(h_hat - h)|
// of the Renyi/Hill transform, summarizing its empirical negligibility.
RemainderReport remainder_diagnostic(const CountableDistribution& dist,
                                     const IndexFamily& family, std::uint64_t n,
                                     std::uint64_t replicates, std::uint64_t seed,
                                     const MdpScaleSpec& scale, double tol = 1e-10,
                                     unsigned threads = 1);

struct ReplicateSums {
    std::vector<double> base;      // per-replicate sum_k g_base(p_hat_k)
    std::vector<double> sigma_sq;  // per-replicate plug-in variance (optional)
};

// Workhorse behind the drivers above, exposed for tests: deterministic
// per-replicate streams (master_seed, stream, j), results indexed by j.
ReplicateSums replicate_sums(const CountableDistribution& dist,
                             const IndexFamily& family, std::uint64_t n,
                             std::uint64_t replicates, std::uint64_t master_seed,
                             std::uint64_t stream, unsigned threads,
                             bool want_sigma);

}  // namespace divmdp
