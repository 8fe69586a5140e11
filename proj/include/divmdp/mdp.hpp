#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "divmdp/distributions.hpp"
#include "divmdp/indices.hpp"

namespace divmdp {

// Moderate-deviation scale b_n: either c n^rho (rho in (0, 1/2)) or
// c (log n)^kappa (kappa > 0), c > 0. Both tend to infinity.
struct MdpScaleSpec {
    enum class Form { Power, LogPower };

    Form form = Form::Power;
    double c = 1.0;
    double exponent = 0.25;  // rho or kappa

    static MdpScaleSpec power(double c, double rho);
    static MdpScaleSpec log_power(double c, double kappa);

    double b(std::uint64_t n) const;
};

struct MdpContext {
    IndexFamily family;
    TriangularFamily dists;
    MdpScaleSpec scale;
    double beta;  // Holder exponent of g'
    double tol = 1e-10;

    static MdpContext make(IndexFamily family, TriangularFamily dists,
                           MdpScaleSpec scale, double tol = 1e-10);
};

struct ScaleValidationRow {
    std::uint64_t n;
    double b_n;
    double sigma_n;
    double ratio;  // b_n / (sqrt(n) sigma_n^{1/(2 beta - 1)})
};

struct ScaleValidationReport {
    bool ok = false;
    double worst_ratio = 0.0;
    std::vector<std::uint64_t> failing_n;
    std::vector<ScaleValidationRow> rows;
};

// Evaluates r_n = b_n / (sqrt(n) sigma_n^{1/(2 beta - 1)}) over the grid
// (beta = 1 reduces the exponent to 1). The asymptotic conditions are
// operationalized as: the ratio never increases after its first maximum,
// that maximum is attained before the last grid point, and the final ratio
// is below 1. The full sequence is reported for inspection.
ScaleValidationReport validate_scale(const MdpContext& ctx,
                                     const std::vector<std::uint64_t>& n_grid);

// Limiting normalized log tail probability: -r^2/2.
double rate_function(double r);

// Threshold t with {|theta_hat - theta_n| > t} equal to the moderate
// deviation event at level r: t = r b_n sigma_n / sqrt(n).
double tail_threshold(const MdpContext& ctx, std::uint64_t n, double r);

// Asymptotic surrogate exp(-b_n^2 r^2 / 2) for the tail probability; an
// approximation, not a bound.
double mdp_tail_approximation(double r, std::uint64_t n, const MdpScaleSpec& scale);

// Human-readable statement of the scale condition that was violated.
std::string scale_condition_text(double beta);

}  // namespace divmdp
