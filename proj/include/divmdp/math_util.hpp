#pragma once

namespace divmdp {

// Compensated summation; keeps long series sums accurate to a few ulps.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Hurwitz zeta sum_{k>=0} (a+k)^{-s} for s > 1, a >= 1, by direct summation
// up to a shift point and an Euler-Maclaurin tail with B2..B8 corrections.
// Relative accuracy is a few 1e-16 over the parameter range used here.
double hurwitz_zeta(double s, double a);

// zeta(s) = hurwitz_zeta(s, 1), s > 1.
double zeta(double s);

// Standard normal CDF via erfc; accurate to ~1e-15.
double normal_cdf(double x);

// Standard normal quantile, absolute error well below 1e-9 on (0,1).
double normal_quantile(double p);

}  // namespace divmdp
