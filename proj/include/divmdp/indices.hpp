#pragma once

#include "divmdp/distributions.hpp"

namespace divmdp {

enum class Transform { None, Tsallis, Renyi, Hill };

// Dichotomous index family g(x) = x^alpha (1-x)^gamma with population value
// theta(P) = sum_i g(p_i), optionally followed by a nonlinear transform of
// h = h_{alpha,0}: Tsallis (h-1)/(1-alpha), Renyi log(h)/(1-alpha), Hill
// h^{1/(1-alpha)}. Transforms require gamma = 0 and alpha > 1.
class IndexFamily {
public:
    explicit IndexFamily(double alpha, double gamma = 0.0,
                         Transform transform = Transform::None);

    static IndexFamily simpson() { return IndexFamily(2.0, 0.0); }
    static IndexFamily tsallis(double alpha) {
        return IndexFamily(alpha, 0.0, Transform::Tsallis);
    }
    static IndexFamily renyi(double alpha) {
        return IndexFamily(alpha, 0.0, Transform::Renyi);
    }
    static IndexFamily hill(double alpha) {
        return IndexFamily(alpha, 0.0, Transform::Hill);
    }

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    Transform transform() const { return transform_; }

    // alpha >= 1 and gamma in {0} union [1, inf): the regime where g' is
    // defined on all of [0,1] and the Holder exponent table applies.
    bool classification_domain() const {
        return alpha_ >= 1.0 && (gamma_ == 0.0 || gamma_ >= 1.0);
    }

private:
    double alpha_;
    double gamma_;
    Transform transform_;
};

// Holder certificate for g': |g'(x)-g'(y)| <= K|x-y|^beta, and the Taylor
// remainder bound |g(x)-g(a)-g'(a)(x-a)| <= M|x-a|^{beta+1}.
struct HolderClass {
    double beta;
    double K;
    double M;
};

// g(x) = x^alpha (1-x)^gamma on [0,1]; 0^0 = 1 at the endpoints.
double g_eval(const IndexFamily& family, double x);

// g'(x) = alpha x^{alpha-1}(1-x)^gamma - gamma x^alpha (1-x)^{gamma-1} with
// limit values at the endpoints; requires the classification domain.
double g_prime(const IndexFamily& family, double x);

// Population index: base series truncated with a certified remainder bound
// below tol, then the transform. Absolute error below tol.
double theta(const IndexFamily& family, const CountableDistribution& dist, double tol);

// The untransformed series sum_i g(p_i) with remainder below tol.
double base_index_sum(const IndexFamily& family, const CountableDistribution& dist,
                      double tol);

// Holder exponent from the four-case classification table (cheap).
double holder_exponent(const IndexFamily& family);

// Exponent plus numeric constants K and M maximized over a dense grid with
// boundary and near-diagonal refinement, inflated by 10%.
HolderClass holder_class(const IndexFamily& family);

// h -> transformed index value (identity for Transform::None).
double apply_transform(const IndexFamily& family, double h);
// dT/dh at h (1 for Transform::None).
double transform_derivative(const IndexFamily& family, double h);
// d2T/dh2 at h (0 for None and Tsallis).
double transform_second_derivative(const IndexFamily& family, double h);

}  // namespace divmdp
