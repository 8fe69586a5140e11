#pragma once

#include <optional>
#include <span>

#include "divmdp/distributions.hpp"
#include "divmdp/empirical_sample.hpp"
#include "divmdp/indices.hpp"

namespace divmdp {

struct ConfidenceInterval {
    double lower;
    double upper;
    double level;
};

struct EstimateReport {
    double theta_hat = 0.0;
    double sigma_hat_sq = 0.0;
    std::uint64_t n = 0;
    std::optional<ConfidenceInterval> ci;
};

// Plug-in index: sum_k g(p_hat_k), then the transform.
double plugin_theta(const EmpiricalSample& sample, const IndexFamily& family);

// Asymptotic variance sum_i p_i g'(p_i)^2 - (sum_i p_i g'(p_i))^2, computed
// from truncated series with certified remainders; transformed families use
// the delta-method prefactor on sum p^{2a-1} - (sum p^a)^2. Absolute error
// below tol; tiny negatives from rounding clamp to 0.
double population_sigma_sq(const CountableDistribution& dist, const IndexFamily& family,
                           double tol);

// Plug-in variance, same functional evaluated at p_hat (transform prefactors
// use h_hat).
double plugin_sigma_sq(const EmpiricalSample& sample, const IndexFamily& family);

// Low-level overload on the nonzero empirical proportions, shared with the
// simulation engine.
double plugin_sigma_sq_from_phats(std::span<const double> p_hats,
                                  const IndexFamily& family);

// theta_hat +/- z_{(1+level)/2} sigma_hat / sqrt(n); throws on degenerate
// variance, where the normal asymptotics fail.
ConfidenceInterval confidence_interval(const EmpiricalSample& sample,
                                       const IndexFamily& family, double level);

}  // namespace divmdp
