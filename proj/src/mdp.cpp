#include "divmdp/mdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "divmdp/estimation.hpp"

namespace divmdp {

MdpScaleSpec MdpScaleSpec::power(double c, double rho) {
    if (!(c > 0.0)) throw std::invalid_argument("scale constant c must be positive");
    if (!(rho > 0.0 && rho < 0.5))
        throw std::invalid_argument("power scale needs rho in (0, 1/2)");
    return MdpScaleSpec{Form::Power, c, rho};
}

MdpScaleSpec MdpScaleSpec::log_power(double c, double kappa) {
    if (!(c > 0.0)) throw std::invalid_argument("scale constant c must be positive");
    if (!(kappa > 0.0)) throw std::invalid_argument("log-power scale needs kappa > 0");
    return MdpScaleSpec{Form::LogPower, c, kappa};
}

double MdpScaleSpec::b(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    const double nd = static_cast<double>(n);
    if (form == Form::Power) return c * std::pow(nd, exponent);
    return c * std::pow(std::log(nd), exponent);
}

MdpContext MdpContext::make(IndexFamily family, TriangularFamily dists,
                            MdpScaleSpec scale, double tol) {
    const double beta = holder_exponent(family);
    return MdpContext{std::move(family), std::move(dists), scale, beta, tol};
}

ScaleValidationReport validate_scale(const MdpContext& ctx,
                                     const std::vector<std::uint64_t>& n_grid) {
    if (n_grid.size() < 2)
        throw std::invalid_argument("scale validation needs at least two grid points");
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    }
    if (!(ctx.beta > 0.5)) throw std::domain_error("MDP unproven for beta <= 1/2");

    const double expo = 1.0 / (2.0 * ctx.beta - 1.0);
    ScaleValidationReport report;
    report.rows.reserve(n_grid.size());
    for (std::uint64_t n : n_grid) {
        const CountableDistribution dist = ctx.dists.at(n);
        const double s2 = population_sigma_sq(dist, ctx.family, ctx.tol);
        const double sigma = std::sqrt(s2);
        const double b = ctx.scale.b(n);
        double ratio;
        if (sigma > 0.0) {
            const double spow = expo == 1.0 ? sigma : std::pow(sigma, expo);
            ratio = b / (std::sqrt(static_cast<double>(n)) * spow);
        } else {
            ratio = std::numeric_limits<double>::infinity();
        }
        report.rows.push_back(ScaleValidationRow{n, b, sigma, ratio});
    }

    std::size_t peak = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i].ratio > report.rows[peak].ratio) peak = i;
    }
    bool ok = peak + 1 < report.rows.size();
    for (std::size_t i = peak + 1; i < report.rows.size(); ++i) {
        if (report.rows[i].ratio > report.rows[i - 1].ratio) {
            ok = false;
            report.failing_n.push_back(report.rows[i].n);
        }
    }
    const auto& last = report.rows.back();
    if (!(last.ratio < 1.0)) {
        ok = false;
        if (report.failing_n.empty() || report.failing_n.back() != last.n) {
            report.failing_n.push_back(last.n);
        }
    }
    for (const auto& row : report.rows) {
        if (!std::isfinite(row.ratio)) {
            ok = false;
            report.failing_n.push_back(row.n);
        }
    }
    report.worst_ratio = report.rows[peak].ratio;
    report.ok = ok;
    return report;
}

double rate_function(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("rate function needs r > 0");
    return -0.5 * r * r;
}

double tail_threshold(const MdpContext& ctx, std::uint64_t n, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("threshold needs r > 0");
    const CountableDistribution dist = ctx.dists.at(n);
    const double s2 = population_sigma_sq(dist, ctx.family, ctx.tol);
    if (!(s2 > 0.0)) throw std::domain_error("degenerate variance");
    return r * ctx.scale.b(n) * std::sqrt(s2) / std::sqrt(static_cast<double>(n));
}

double mdp_tail_approximation(double r, std::uint64_t n, const MdpScaleSpec& scale) {
    const double b = scale.b(n);
    return std::exp(-0.5 * b * b * r * r);
}

std::string scale_condition_text(double beta) {
    if (beta == 1.0) {
        return "need b_n -> infinity and b_n/(sqrt(n) sigma_n) -> 0";
    }
    return "need b_n -> infinity and b_n/(sqrt(n) sigma_n^{1/(2 beta - 1)}) -> 0 "
           "(beta = " +
           std::to_string(beta) + ")";
}

}  // namespace divmdp
