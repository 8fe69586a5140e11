#include "divmdp/math_util.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace divmdp {

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0)) throw std::domain_error("hurwitz_zeta: requires s > 1");
    if (!(a >= 1.0)) throw std::domain_error("hurwitz_zeta: requires a >= 1");
    // Sum terms until the argument is comfortably inside the asymptotic
    // regime, then close with the Euler-Maclaurin tail.
    const double shift = 32.0 + 2.0 * s;
    KahanSum head;
    double x = a;
    while (x < shift) {
        head.add(std::pow(x, -s));
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double xms = std::pow(x, -s);
    double tail = xms * x / (s - 1.0) + 0.5 * xms;
    const double inv2 = inv * inv;
    double c = xms * inv * s;
    tail += c / 12.0;  // B2/2!
    c *= inv2 * (s + 1.0) * (s + 2.0);
    tail -= c / 720.0;  // B4/4!
    c *= inv2 * (s + 3.0) * (s + 4.0);
    tail += c / 30240.0;  // B6/6!
    c *= inv2 * (s + 5.0) * (s + 6.0);
    tail -= c / 1209600.0;  // B8/8!
    return head.value() + tail;
}

double zeta(double s) { return hurwitz_zeta(s, 1.0); }

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    }
    // Acklam's rational approximation (~1e-9), then one Halley step against
    // the erfc-based CDF brings it to full double precision.
    static const double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
            (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    }
    if (std::fabs(x) < 35.0) {
        const double e = normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace divmdp
