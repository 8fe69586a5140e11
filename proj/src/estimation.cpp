#include "divmdp/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "divmdp/math_util.hpp"

namespace divmdp {

namespace {

constexpr double kNegativeClamp = -1e-12;

double clamp_variance(double v) {
    if (v >= 0.0) return v;
    if (v >= kNegativeClamp) return 0.0;
    throw std::logic_error("variance fell below the rounding clamp; formula bug");
}

std::uint64_t cutoff_for(const CountableDistribution& dist, double exponent,
                         double tol) {
    if (dist.support_size() != 0) return dist.support_size();
    std::uint64_t n = 64;
    while (dist.power_sum_tail_bound(exponent, n) >= tol) {
        if (n > (std::uint64_t{1} << 34))
            throw std::runtime_error("series truncation did not converge");
        n *= 2;
    }
    return n;
}

// sum_i p_i^e with remainder below tol.
double power_series(const CountableDistribution& dist, double e, double tol) {
    const std::uint64_t cutoff = cutoff_for(dist, e, tol);
    KahanSum sum;
    for (std::uint64_t i = 1; i <= cutoff; ++i) sum.add(std::pow(dist.mass(i), e));
    return sum.value();
}

// gamma = 0 case: sigma^2 = (a |T'(h)|)^2 [ sum p^{2a-1} - (sum p^a)^2 ].
double sigma_sq_power_form(const CountableDistribution& dist, const IndexFamily& f,
                           double tol) {
    const double a = f.alpha();
    if (a == 1.0) return 0.0;  // g' is constant: the index is degenerate
    double tol_c = std::min(tol / 8.0, 1e-6);
    for (int pass = 0; pass < 4; ++pass) {
        const double sa = power_series(dist, a, tol_c);
        const double sb = power_series(dist, 2.0 * a - 1.0, tol_c);
        const double v = sb - sa * sa;
        const double pref = a * std::fabs(transform_derivative(f, sa));
        // error budget: dv from both series, plus the prefactor's h-dependence
        const double dv = tol_c * (1.0 + 2.0 * (std::fabs(sa) + tol_c));
        const double dpref = a * std::fabs(transform_second_derivative(f, sa)) * tol_c;
        const double err = pref * pref * dv + 2.0 * pref * dpref * std::fabs(v);
        if (err < tol || tol_c <= 1e-15) return clamp_variance(pref * pref * v);
        tol_c = std::min(tol_c * 1e-2, tol / (16.0 * std::max(1.0, pref * pref)));
    }
    throw std::runtime_error("variance tolerance loop failed to settle");
}

// general case: sigma^2 = sum p (g'(p)-c)^2 - (sum p (g'(p)-c))^2 with the
// centering c = g'(0) (the variance is shift-invariant). Centering matters
// for alpha = 1, where g' tends to a nonzero constant in the tail: the
// centered terms obey |g'(p)-c| <= C p^e with e = min(alpha-1, 1) for
// alpha > 1 (C = alpha+gamma) and e = 1 for alpha = 1 (C = 2 gamma), which
// keeps the truncation cutoffs small on heavy tails.
double sigma_sq_general_form(const CountableDistribution& dist, const IndexFamily& f,
                             double tol) {
    const double a = f.alpha();
    const double center = g_prime(f, 0.0);
    const double dev_coeff = a > 1.0 ? a + f.gamma() : 2.0 * f.gamma();
    const double dev_expo = a > 1.0 ? std::min(a - 1.0, 1.0) : 1.0;
    if (dev_coeff == 0.0) return 0.0;  // g' constant
    double tol_c = std::min(tol / 8.0, 1e-6);
    for (int pass = 0; pass < 4; ++pass) {
        const std::uint64_t n1 = cutoff_for(dist, 1.0 + 2.0 * dev_expo,
                                            tol_c / (dev_coeff * dev_coeff));
        const std::uint64_t n2 =
            cutoff_for(dist, 1.0 + dev_expo, tol_c / dev_coeff);
        const std::uint64_t cutoff = std::max(n1, n2);
        KahanSum t1;
        KahanSum t2;
        for (std::uint64_t i = 1; i <= cutoff; ++i) {
            const double p = dist.mass(i);
            const double gp = g_prime(f, p) - center;
            t1.add(p * gp * gp);
            t2.add(p * gp);
        }
        const double v = t1.value() - t2.value() * t2.value();
        const double err = tol_c * (1.0 + 2.0 * (std::fabs(t2.value()) + tol_c));
        if (err < tol || tol_c <= 1e-15) return clamp_variance(v);
        tol_c *= 1e-2;
    }
    throw std::runtime_error("variance tolerance loop failed to settle");
}

}  // namespace

double plugin_theta(const EmpiricalSample& sample, const IndexFamily& family) {
    const double inv_n = 1.0 / static_cast<double>(sample.n);
    double base = 0.0;
    for (const auto& [letter, count] : sample.counts) {
        base += g_eval(family, static_cast<double>(count) * inv_n);
    }
    return apply_transform(family, base);
}

double population_sigma_sq(const CountableDistribution& dist, const IndexFamily& family,
                           double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (!family.classification_domain()) {
        throw std::domain_error(
            "variance needs alpha >= 1 and gamma in {0} union [1, inf)");
    }
    if (family.gamma() == 0.0) return sigma_sq_power_form(dist, family, tol);
    return sigma_sq_general_form(dist, family, tol);
}

double plugin_sigma_sq_from_phats(std::span<const double> p_hats,
                                  const IndexFamily& family) {
    if (!family.classification_domain()) {
        throw std::domain_error(
            "variance needs alpha >= 1 and gamma in {0} union [1, inf)");
    }
    const double a = family.alpha();
    if (family.gamma() == 0.0) {
        double sa = 0.0;
        double sb = 0.0;
        for (double p : p_hats) {
            sa += std::pow(p, a);
            sb += std::pow(p, 2.0 * a - 1.0);
        }
        const double pref = a * std::fabs(transform_derivative(family, sa));
        return clamp_variance(pref * pref * (sb - sa * sa));
    }
    double t1 = 0.0;
    double t2 = 0.0;
    for (double p : p_hats) {
        const double gp = g_prime(family, p);
        t1 += p * gp * gp;
        t2 += p * gp;
    }
    return clamp_variance(t1 - t2 * t2);
}

double plugin_sigma_sq(const EmpiricalSample& sample, const IndexFamily& family) {
    const double inv_n = 1.0 / static_cast<double>(sample.n);
    std::vector<double> p_hats;
    p_hats.reserve(sample.counts.size());
    for (const auto& [letter, count] : sample.counts) {
        p_hats.push_back(static_cast<double>(count) * inv_n);
    }
    return plugin_sigma_sq_from_phats(p_hats, family);
}

ConfidenceInterval confidence_interval(const EmpiricalSample& sample,
                                       const IndexFamily& family, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("confidence level must lie in (0,1)");
    const double s2 = plugin_sigma_sq(sample, family);
    if (!(s2 > 0.0)) {
        throw std::domain_error("degenerate variance: normal asymptotics fail");
    }
    const double z = normal_quantile(0.5 * (1.0 + level));
    const double center = plugin_theta(sample, family);
    const double half = z * std::sqrt(s2 / static_cast<double>(sample.n));
    return ConfidenceInterval{center - half, center + half, level};
}

}  // namespace divmdp
