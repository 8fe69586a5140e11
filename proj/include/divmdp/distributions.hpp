#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "divmdp/empirical_sample.hpp"
#include "divmdp/rng.hpp"

namespace divmdp {

enum class DistKind { Finite, Geometric, Zeta, TwoPointPerturbed, Custom };

namespace detail {
class DistImpl;
}

// A probability mass function on the positive integers. The parametric
// kinds know their tail mass in closed or bounded form. Sampling inverts
// the CDF exactly: a lazily extended, shared prefix-sum cache covers the
// bulk of the mass, and draws past the cached prefix use the closed-form
// tail quantile of the kind, so there is no truncation bias.
//
// Distributions are immutable after construction. The cache extension is
// mutex-guarded and append-only (readers are lock-free); call prepare()
// before fanning out sampling threads to keep them contention-free.
class CountableDistribution {
public:
    static CountableDistribution finite(std::vector<double> weights);
    static CountableDistribution geometric(double q);
    static CountableDistribution zeta(double s);
    static CountableDistribution two_point_perturbed(double gamma, std::uint64_t n);
    // mass(i) for i = 1..support_size (support_size 0 = infinite). An
    // infinite-support custom distribution needs tail_bound(N) >= sum_{i>N} p_i
    // for the series operations to terminate.
    static CountableDistribution custom(std::function<double(std::uint64_t)> mass,
                                        std::uint64_t support_size = 0,
                                        std::function<double(std::uint64_t)> tail_bound = {});

    DistKind kind() const;
    std::uint64_t support_size() const;  // 0 = countably infinite
    double geometric_q() const;          // throws unless kind == Geometric
    double zeta_exponent() const;        // throws unless kind == Zeta

    // p_i; 0 past a finite support.
    double mass(std::uint64_t i) const;
    // Upper bound on sum_{i>N} p_i (exact for Geometric, integral bound for
    // Zeta, exact suffix sum for finite supports).
    double tail_mass_bound(std::uint64_t N) const;
    // Upper bound on sum_{i>N} p_i^e; throws if the power sum diverges or
    // cannot be bounded for this kind.
    double power_sum_tail_bound(double e, std::uint64_t N) const;

    std::uint64_t draw(std::mt19937_64& eng) const;
    EmpiricalSample sample_counts(std::uint64_t n, std::mt19937_64& eng) const;

    // Extends the CDF cache far enough that a run of `expected_draws` draws
    // rarely leaves the cached prefix.
    void prepare(std::uint64_t expected_draws) const;

    // Snapshot of the cache: nondecreasing, bounded by 1, append-only.
    std::vector<double> cached_cdf() const;

private:
    explicit CountableDistribution(std::shared_ptr<detail::DistImpl> impl);
    std::shared_ptr<detail::DistImpl> impl_;
    friend class SamplerView;
};

namespace detail {
// Out-of-line pieces of the sampler; defined in distributions.cpp.
std::uint64_t sampler_slow_draw(const DistImpl& impl, double u);
const double* sampler_snapshot(const DistImpl& impl, std::size_t& size);
}  // namespace detail

// Non-owning snapshot of a distribution for hot sampling loops. The common
// case (u inside the cached prefix) stays fully inline; draws beyond it fall
// back to the implementation, which may extend the cache (mutex-guarded) or
// use the closed-form tail quantile.
class SamplerView {
public:
    explicit SamplerView(const CountableDistribution& dist) : impl_(dist.impl_.get()) {
        cdf_ = detail::sampler_snapshot(*impl_, size_);
    }

    std::uint64_t draw(std::mt19937_64& eng) const {
        const double u = uniform01(eng);
        if (size_ >= kHotPrefix && u < cdf_[kHotPrefix - 1]) {
            return 1 + static_cast<std::uint64_t>(
                           std::upper_bound(cdf_, cdf_ + kHotPrefix, u) - cdf_);
        }
        if (size_ > 0 && u < cdf_[size_ - 1]) {
            return 1 + static_cast<std::uint64_t>(
                           std::upper_bound(cdf_, cdf_ + size_, u) - cdf_);
        }
        return detail::sampler_slow_draw(*impl_, u);
    }

private:
    static constexpr std::size_t kHotPrefix = 128;
    const detail::DistImpl* impl_;
    const double* cdf_ = nullptr;
    std::size_t size_ = 0;
};

// Distribution family indexed by the sample size n; constant families are
// the fixed-distribution special case.
class TriangularFamily {
public:
    explicit TriangularFamily(std::function<CountableDistribution(std::uint64_t)> generator);
    static TriangularFamily fixed(CountableDistribution dist);
    // p_{n,1} = 1/2 + n^{-gamma}/2, p_{n,2} = 1 - p_{n,1}, gamma in (0, 1/2).
    static TriangularFamily two_point(double gamma);
    // geometric with success probability q_n = 1 - n^{-a}, a in (0,1), n >= 2.
    static TriangularFamily geometric_decay(double a);

    CountableDistribution at(std::uint64_t n) const;
    bool is_fixed() const { return fixed_; }

private:
    std::function<CountableDistribution(std::uint64_t)> gen_;
    bool fixed_ = false;
};

}  // namespace divmdp
