#include "divmdp/distributions.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "divmdp/math_util.hpp"

namespace divmdp {
namespace detail {

namespace {
constexpr std::size_t kInfiniteCacheCap = std::size_t{1} << 21;
constexpr std::uint64_t kMaxLetter = std::uint64_t{1} << 62;
}  // namespace

class DistImpl {
public:
    DistKind kind;
    // Kind parameters; only the ones matching `kind` are meaningful.
    std::vector<double> probs;  // Finite, TwoPointPerturbed (normalized)
    double q = 0.0;             // Geometric
    double s = 0.0;             // Zeta exponent
    double zeta_s = 0.0;        // zeta(s)
    std::function<double(std::uint64_t)> custom_mass;
    std::function<double(std::uint64_t)> custom_tail;
    std::uint64_t support = 0;  // 0 = countably infinite
    std::uint64_t last_positive = 0;  // finite kinds: largest letter with p > 0

    // CDF prefix cache: cdf_[i] = P(X <= i+1). Append-only; capacity is
    // reserved up front so readers never observe a reallocation. cdf_size_
    // is the publication point for lock-free readers.
    mutable std::vector<double> cdf_;
    mutable std::atomic<std::size_t> cdf_size_{0};
    mutable std::mutex extend_mutex_;
    mutable double kahan_sum_ = 0.0;   // guarded by extend_mutex_
    mutable double kahan_comp_ = 0.0;  // guarded by extend_mutex_
    std::size_t cache_cap_ = 0;

    double mass(std::uint64_t i) const {
        if (i == 0) throw std::invalid_argument("letter indices start at 1");
        switch (kind) {
            case DistKind::Finite:
            case DistKind::TwoPointPerturbed:
                return i <= probs.size() ? probs[i - 1] : 0.0;
            case DistKind::Geometric:
                return q * std::exp(static_cast<double>(i - 1) * std::log1p(-q));
            case DistKind::Zeta:
                return std::pow(static_cast<double>(i), -s) / zeta_s;
            case DistKind::Custom:
                if (support != 0 && i > support) return 0.0;
                return custom_mass(i);
        }
        return 0.0;
    }

    double tail_mass_bound(std::uint64_t N) const {
        if (N == 0) throw std::invalid_argument("tail bound needs N >= 1");
        switch (kind) {
            case DistKind::Finite:
            case DistKind::TwoPointPerturbed: {
                if (N >= probs.size()) return 0.0;
                KahanSum tail;
                for (std::size_t i = probs.size(); i > N; --i) tail.add(probs[i - 1]);
                return tail.value();
            }
            case DistKind::Geometric:
                return std::exp(static_cast<double>(N) * std::log1p(-q));
            case DistKind::Zeta:
                return std::pow(static_cast<double>(N), 1.0 - s) / ((s - 1.0) * zeta_s);
            case DistKind::Custom: {
                if (support != 0 && N >= support) return 0.0;
                if (support != 0) {
                    KahanSum tail;
                    for (std::uint64_t i = N + 1; i <= support; ++i) tail.add(custom_mass(i));
                    return tail.value();
                }
                if (custom_tail) return custom_tail(N);
                throw std::domain_error(
                    "custom distribution with infinite support has no tail bound");
            }
        }
        return 0.0;
    }

    double power_sum_tail_bound(double e, std::uint64_t N) const {
        if (!(e > 0.0)) throw std::invalid_argument("power exponent must be positive");
        if (N == 0) throw std::invalid_argument("tail bound needs N >= 1");
        switch (kind) {
            case DistKind::Finite:
            case DistKind::TwoPointPerturbed: {
                if (N >= probs.size()) return 0.0;
                KahanSum tail;
                for (std::size_t i = probs.size(); i > N; --i)
                    tail.add(std::pow(probs[i - 1], e));
                return tail.value();
            }
            case DistKind::Geometric: {
                const double log1mq = std::log1p(-q);
                const double denom = -std::expm1(e * log1mq);
                return std::pow(q, e) * std::exp(e * static_cast<double>(N) * log1mq) / denom;
            }
            case DistKind::Zeta: {
                const double es = e * s;
                if (es <= 1.0) {
                    throw std::domain_error("power sum diverges: exponent*s must exceed 1");
                }
                return std::pow(zeta_s, -e) *
                       std::pow(static_cast<double>(N), 1.0 - es) / (es - 1.0);
            }
            case DistKind::Custom: {
                if (support != 0 && N >= support) return 0.0;
                if (support != 0) {
                    KahanSum tail;
                    for (std::uint64_t i = N + 1; i <= support; ++i)
                        tail.add(std::pow(custom_mass(i), e));
                    return tail.value();
                }
                if (e >= 1.0 && custom_tail) {
                    // each tail term is at most the whole tail mass
                    return std::pow(custom_tail(N), e);
                }
                throw std::domain_error(
                    "custom distribution: no power-sum tail bound available");
            }
        }
        return 0.0;
    }

    // Appends entries up to `target` (clamped to the cap); stops early if
    // the mass underflows to zero, where the prefix sum can no longer move.
    void extend_cache_to(std::size_t target) const {
        target = std::min(target, cache_cap_);
        if (cdf_size_.load(std::memory_order_acquire) >= target) return;
        std::lock_guard<std::mutex> lock(extend_mutex_);
        std::size_t sz = cdf_size_.load(std::memory_order_relaxed);
        while (sz < target) {
            const double m = mass(sz + 1);
            if (m == 0.0 && kind != DistKind::Finite &&
                kind != DistKind::TwoPointPerturbed) {
                break;
            }
            const double y = m - kahan_comp_;
            const double t = kahan_sum_ + y;
            kahan_comp_ = (t - kahan_sum_) - y;
            kahan_sum_ = t;
            cdf_.push_back(std::min(kahan_sum_, 1.0));
            ++sz;
            cdf_size_.store(sz, std::memory_order_release);
        }
    }

    std::uint64_t tail_quantile(double u, std::uint64_t lo) const;
    std::uint64_t draw_slow(double u) const;

    std::uint64_t search(const double* d, std::size_t sz, double u) const {
        return 1 + static_cast<std::uint64_t>(std::upper_bound(d, d + sz, u) - d);
    }
};

// Smallest letter m > lo with CDF(m) > u, via the closed-form tail of the
// kind. Only meaningful for Geometric and Zeta.
std::uint64_t DistImpl::tail_quantile(double u, std::uint64_t lo) const {
    if (kind == DistKind::Geometric) {
        // CDF(m) = 1 - (1-q)^m  =>  m = floor(log(1-u)/log(1-q)) + 1
        const double ratio = std::log1p(-u) / std::log1p(-q);
        std::uint64_t m = ratio >= 9.0e18
                              ? kMaxLetter
                              : static_cast<std::uint64_t>(std::floor(ratio)) + 1;
        return std::max(m, lo + 1);
    }
    // Zeta: smallest m with zeta(s, m+1) <= (1-u)*zeta(s). The Hurwitz tail
    // is the analytic continuation of the same prefix sums, so the inversion
    // stays exact past the cache (letter indices clamp at 2^62; the clamped
    // mass is negligible for any s bounded away from 1).
    const double target = (1.0 - u) * zeta_s;
    if (!(target > 0.0)) return kMaxLetter;
    double guess = std::pow(target * (s - 1.0), 1.0 / (1.0 - s));
    if (!std::isfinite(guess)) guess = 0.0;
    std::uint64_t hi = lo + 1;
    if (guess > static_cast<double>(hi)) {
        hi = guess >= 4.5e18 ? kMaxLetter : static_cast<std::uint64_t>(guess) + 1;
    }
    while (hi < kMaxLetter && hurwitz_zeta(s, static_cast<double>(hi) + 1.0) > target) {
        lo = hi;
        hi = hi > kMaxLetter / 2 ? kMaxLetter : hi * 2;
    }
    if (hi <= lo) return lo + 1;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (hurwitz_zeta(s, static_cast<double>(mid) + 1.0) <= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::uint64_t DistImpl::draw_slow(double u) const {
    for (;;) {
        const std::size_t sz = cdf_size_.load(std::memory_order_acquire);
        if (sz > 0 && u < cdf_[sz - 1]) return search(cdf_.data(), sz, u);
        if (sz >= cache_cap_) break;
        const std::size_t target =
            std::min(cache_cap_, std::max<std::size_t>(1024, sz * 2));
        extend_cache_to(target);
        if (cdf_size_.load(std::memory_order_acquire) == sz) break;  // stalled
    }
    const std::size_t sz = cdf_size_.load(std::memory_order_acquire);
    if (sz > 0 && u < cdf_[sz - 1]) return search(cdf_.data(), sz, u);
    switch (kind) {
        case DistKind::Finite:
        case DistKind::TwoPointPerturbed:
            // u fell in the rounding gap above the last cached value
            return last_positive;
        case DistKind::Geometric:
        case DistKind::Zeta:
            return tail_quantile(u, sz);
        case DistKind::Custom: {
            // transient walk; never mutates shared state
            double acc = sz > 0 ? cdf_[sz - 1] : 0.0;
            std::uint64_t i = sz;
            for (;;) {
                ++i;
                if (support != 0 && i > support) return support;
                const double next = acc + custom_mass(i);
                if (next > u) return i;
                if (next == acc) return i;  // mass underflow: clamp here
                acc = next;
            }
        }
    }
    return 1;
}

std::uint64_t sampler_slow_draw(const DistImpl& impl, double u) { return impl.draw_slow(u); }

const double* sampler_snapshot(const DistImpl& impl, std::size_t& size) {
    size = impl.cdf_size_.load(std::memory_order_acquire);
    return impl.cdf_.data();
}

}  // namespace detail

using detail::DistImpl;

CountableDistribution::CountableDistribution(std::shared_ptr<DistImpl> impl)
    : impl_(std::move(impl)) {}

CountableDistribution CountableDistribution::finite(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("finite distribution needs weights");
    KahanSum total;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("finite weights must be finite and nonnegative");
        total.add(w);
    }
    const double sum = total.value();
    if (!(sum >= 1.0 - 1e-9 && sum <= 1.0 + 1e-9)) {
        throw std::invalid_argument(
            "finite weights must sum to 1 within 1e-9 before normalization");
    }
    auto impl = std::make_shared<DistImpl>();
    impl->kind = DistKind::Finite;
    impl->probs.reserve(weights.size());
    for (double w : weights) impl->probs.push_back(w / sum);
    impl->support = impl->probs.size();
    for (std::size_t i = 0; i < impl->probs.size(); ++i) {
        if (impl->probs[i] > 0.0) impl->last_positive = i + 1;
    }
    if (impl->last_positive == 0)
        throw std::invalid_argument("finite distribution needs a positive weight");
    impl->cache_cap_ = impl->probs.size();
    impl->cdf_.reserve(impl->cache_cap_);
    return CountableDistribution(std::move(impl));
}

CountableDistribution CountableDistribution::geometric(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("geometric success probability must lie in (0,1)");
    auto impl = std::make_shared<DistImpl>();
    impl->kind = DistKind::Geometric;
    impl->q = q;
    impl->cache_cap_ = detail::kInfiniteCacheCap;
    impl->cdf_.reserve(1024);
    return CountableDistribution(std::move(impl));
}

CountableDistribution CountableDistribution::zeta(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("zeta exponent must exceed 1");
    auto impl = std::make_shared<DistImpl>();
    impl->kind = DistKind::Zeta;
    impl->s = s;
    impl->zeta_s = divmdp::zeta(s);
    impl->cache_cap_ = detail::kInfiniteCacheCap;
    impl->cdf_.reserve(impl->cache_cap_);
    return CountableDistribution(std::move(impl));
}

CountableDistribution CountableDistribution::two_point_perturbed(double gamma,
                                                                 std::uint64_t n) {
    if (!(gamma > 0.0 && gamma < 0.5))
        throw std::invalid_argument("two-point perturbation needs gamma in (0, 1/2)");
    if (n == 0) throw std::invalid_argument("two-point perturbation needs n >= 1");
    auto impl = std::make_shared<DistImpl>();
    impl->kind = DistKind::TwoPointPerturbed;
    const double p1 = 0.5 + 0.5 * std::pow(static_cast<double>(n), -gamma);
    // complement keeps p1 + p2 == 1 exact
    impl->probs = {p1, 1.0 - p1};
    impl->support = 2;
    impl->last_positive = impl->probs[1] > 0.0 ? 2 : 1;
    impl->cache_cap_ = 2;
    impl->cdf_.reserve(2);
    return CountableDistribution(std::move(impl));
}

CountableDistribution CountableDistribution::custom(
    std::function<double(std::uint64_t)> mass, std::uint64_t support_size,
    std::function<double(std::uint64_t)> tail_bound) {
    if (!mass) throw std::invalid_argument("custom distribution needs a mass function");
    auto impl = std::make_shared<DistImpl>();
    impl->kind = DistKind::Custom;
    impl->custom_mass = std::move(mass);
    impl->custom_tail = std::move(tail_bound);
    impl->support = support_size;
    if (support_size != 0) {
        impl->last_positive = support_size;
        impl->cache_cap_ = support_size;
    } else {
        impl->cache_cap_ = detail::kInfiniteCacheCap;
    }
    impl->cdf_.reserve(std::min<std::size_t>(impl->cache_cap_, 4096));
    return CountableDistribution(std::move(impl));
}

DistKind CountableDistribution::kind() const { return impl_->kind; }

std::uint64_t CountableDistribution::support_size() const { return impl_->support; }

double CountableDistribution::geometric_q() const {
    if (impl_->kind != DistKind::Geometric)
        throw std::logic_error("geometric_q: wrong distribution kind");
    return impl_->q;
}

double CountableDistribution::zeta_exponent() const {
    if (impl_->kind != DistKind::Zeta)
        throw std::logic_error("zeta_exponent: wrong distribution kind");
    return impl_->s;
}

double CountableDistribution::mass(std::uint64_t i) const { return impl_->mass(i); }

double CountableDistribution::tail_mass_bound(std::uint64_t N) const {
    return impl_->tail_mass_bound(N);
}

double CountableDistribution::power_sum_tail_bound(double e, std::uint64_t N) const {
    return impl_->power_sum_tail_bound(e, N);
}

std::uint64_t CountableDistribution::draw(std::mt19937_64& eng) const {
    return SamplerView(*this).draw(eng);
}

EmpiricalSample CountableDistribution::sample_counts(std::uint64_t n,
                                                     std::mt19937_64& eng) const {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    prepare(n);
    SamplerView view(*this);
    std::unordered_map<std::uint64_t, std::uint64_t> acc;
    for (std::uint64_t k = 0; k < n; ++k) ++acc[view.draw(eng)];
    std::vector<std::pair<std::uint64_t, std::uint64_t>> rows(acc.begin(), acc.end());
    return EmpiricalSample::from_counts(std::move(rows));
}

void CountableDistribution::prepare(std::uint64_t expected_draws) const {
    auto& impl = *impl_;
    if (impl.kind == DistKind::Finite || impl.kind == DistKind::TwoPointPerturbed) {
        impl.extend_cache_to(impl.cache_cap_);
        return;
    }
    const double draws = static_cast<double>(std::max<std::uint64_t>(expected_draws, 1));
    std::size_t target = std::max<std::size_t>(
        1024, impl.cdf_size_.load(std::memory_order_acquire));
    if (impl.kind == DistKind::Custom && !impl.custom_tail) {
        impl.extend_cache_to(std::min<std::size_t>(impl.cache_cap_, 4096));
        return;
    }
    const double tail_target = 1.0 / (16.0 * draws);
    while (target < impl.cache_cap_ &&
           impl.tail_mass_bound(target) > tail_target) {
        target *= 2;
    }
    impl.extend_cache_to(std::min(target, impl.cache_cap_));
}

std::vector<double> CountableDistribution::cached_cdf() const {
    const std::size_t sz = impl_->cdf_size_.load(std::memory_order_acquire);
    return std::vector<double>(impl_->cdf_.begin(), impl_->cdf_.begin() + sz);
}

TriangularFamily::TriangularFamily(std::function<CountableDistribution(std::uint64_t)> generator)
    : gen_(std::move(generator)) {
    if (!gen_) throw std::invalid_argument("triangular family needs a generator");
}

TriangularFamily TriangularFamily::fixed(CountableDistribution dist) {
    TriangularFamily fam([d = std::move(dist)](std::uint64_t) { return d; });
    fam.fixed_ = true;
    return fam;
}

TriangularFamily TriangularFamily::two_point(double gamma) {
    if (!(gamma > 0.0 && gamma < 0.5))
        throw std::invalid_argument("two-point family needs gamma in (0, 1/2)");
    return TriangularFamily([gamma](std::uint64_t n) {
        return CountableDistribution::two_point_perturbed(gamma, n);
    });
}

TriangularFamily TriangularFamily::geometric_decay(double a) {
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("geometric-decay family needs a in (0,1)");
    return TriangularFamily([a](std::uint64_t n) {
        if (n < 2)
            throw std::invalid_argument("geometric-decay family is defined for n >= 2");
        const double q = -std::expm1(-a * std::log(static_cast<double>(n)));
        return CountableDistribution::geometric(q);
    });
}

CountableDistribution TriangularFamily::at(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    return gen_(n);
}

}  // namespace divmdp
