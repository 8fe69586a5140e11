#include "divmdp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "divmdp/estimation.hpp"
#include "divmdp/math_util.hpp"
#include "divmdp/rng.hpp"

namespace divmdp {

namespace {

// Flat counts for letters up to kHeadLetters, touched-list reset; rarer
// letters beyond go to a small linear-probed overflow vector.
constexpr std::uint64_t kHeadLetters = std::uint64_t{1} << 20;

struct CountBuffer {
    std::vector<std::uint32_t> head;
    std::vector<std::uint32_t> touched;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> big;

    CountBuffer() : head(kHeadLetters, 0) {}

    void add(std::uint64_t letter) {
        if (letter <= kHeadLetters) {
            const auto idx = static_cast<std::uint32_t>(letter - 1);
            if (head[idx]++ == 0) touched.push_back(idx);
        } else {
            for (auto& entry : big) {
                if (entry.first == letter) {
                    ++entry.second;
                    return;
                }
            }
            big.emplace_back(letter, 1);
        }
    }

    void reset() {
        for (auto idx : touched) head[idx] = 0;
        touched.clear();
        big.clear();
    }
};

void fill_phats(const CountBuffer& buf, double inv_n, std::vector<double>& out) {
    out.clear();
    for (auto idx : buf.touched) out.push_back(buf.head[idx] * inv_n);
    for (const auto& entry : buf.big) out.push_back(entry.second * inv_n);
}

double base_sum_of(const std::vector<double>& p_hats, const IndexFamily& family) {
    double sum = 0.0;
    for (double p : p_hats) sum += g_eval(family, p);
    return sum;
}

void run_partitioned(std::uint64_t replicates, unsigned threads,
                     const std::function<void(std::uint64_t, std::uint64_t)>& work) {
    if (threads <= 1 || replicates < 2) {
        work(0, replicates);
        return;
    }
    const unsigned t = std::min<std::uint64_t>(threads, replicates);
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned k = 0; k < t; ++k) {
        const std::uint64_t lo = replicates * k / t;
        const std::uint64_t hi = replicates * (k + 1) / t;
        pool.emplace_back([&work, lo, hi] { work(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

double ks_to_standard_normal(std::vector<double> z) {
    std::sort(z.begin(), z.end());
    const double inv = 1.0 / static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max(d, f - static_cast<double>(i) * inv);
        d = std::max(d, static_cast<double>(i + 1) * inv - f);
    }
    return d;
}

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.replicates < 100)
        throw std::invalid_argument("rate estimation needs at least 100 replicates");
    if (cfg.n_grid.empty())
        throw std::invalid_argument("experiment needs an n grid");
    if (cfg.threads == 0) throw std::invalid_argument("threads must be at least 1");
}

}  // namespace

ReplicateSums replicate_sums(const CountableDistribution& dist,
                             const IndexFamily& family, std::uint64_t n,
                             std::uint64_t replicates, std::uint64_t master_seed,
                             std::uint64_t stream, unsigned threads,
                             bool want_sigma) {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("sample size exceeds the counting range");
    dist.prepare(n * replicates < n ? std::uint64_t(-1) : n * replicates);
    ReplicateSums out;
    out.base.resize(replicates);
    if (want_sigma) out.sigma_sq.resize(replicates);
    const double inv_n = 1.0 / static_cast<double>(n);

    run_partitioned(replicates, threads, [&](std::uint64_t lo, std::uint64_t hi) {
        SamplerView view(dist);
        CountBuffer buf;
        std::vector<double> p_hats;
        p_hats.reserve(1024);
        for (std::uint64_t j = lo; j < hi; ++j) {
            auto eng = make_engine(master_seed, stream, j);
            for (std::uint64_t k = 0; k < n; ++k) buf.add(view.draw(eng));
            fill_phats(buf, inv_n, p_hats);
            out.base[j] = base_sum_of(p_hats, family);
            if (want_sigma) out.sigma_sq[j] = plugin_sigma_sq_from_phats(p_hats, family);
            buf.reset();
        }
    });
    return out;
}

RateCurve run_experiment(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (cfg.r_grid.empty())
        throw std::invalid_argument("rate experiment needs an r grid");
    for (double r : cfg.r_grid) {
        if (!(r > 0.0)) throw std::invalid_argument("r grid must be positive");
    }
    MdpContext ctx = MdpContext::make(cfg.family, cfg.dists, cfg.scale, cfg.tol);
    const auto validation = validate_scale(ctx, cfg.n_grid);
    if (!validation.ok) {
        throw std::invalid_argument("moderate deviation scale invalid: " +
                                    scale_condition_text(ctx.beta));
    }

    RateCurve curve;
    curve.replicates = cfg.replicates;
    const double inv_r = 1.0 / static_cast<double>(cfg.replicates);
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const std::uint64_t n = cfg.n_grid[ni];
        const CountableDistribution dist = cfg.dists.at(n);
        const double theta_n = theta(cfg.family, dist, cfg.tol);
        const double sigma_n =
            std::sqrt(population_sigma_sq(dist, cfg.family, cfg.tol));
        const double b = cfg.scale.b(n);
        const auto sums = replicate_sums(dist, cfg.family, n, cfg.replicates,
                                         cfg.master_seed, ni, cfg.threads, false);
        std::vector<double> devs(cfg.replicates);
        for (std::uint64_t j = 0; j < cfg.replicates; ++j) {
            devs[j] = std::fabs(apply_transform(cfg.family, sums.base[j]) - theta_n);
        }
        for (double r : cfg.r_grid) {
            const double t = r * b * sigma_n / std::sqrt(static_cast<double>(n));
            std::uint64_t hits = 0;
            for (double dev : devs) hits += dev > t ? 1 : 0;
            RatePoint point{};
            point.n = n;
            point.b_n = b;
            point.r = r;
            point.hits = hits;
            point.p_hat = static_cast<double>(hits) * inv_r;
            point.censored = hits == 0;
            const double b2 = b * b;
            if (point.censored) {
                point.l_hat = std::log(inv_r) / b2;
                point.se = 0.0;
            } else {
                point.l_hat = std::log(point.p_hat) / b2;
                point.se = std::sqrt(point.p_hat * (1.0 - point.p_hat) * inv_r) /
                           (point.p_hat * b2);
            }
            curve.points.push_back(point);
        }
    }
    return curve;
}

std::vector<SimulationRow> run_simulation(const ExperimentConfig& cfg) {
    validate_common(cfg);
    MdpContext ctx = MdpContext::make(cfg.family, cfg.dists, cfg.scale, cfg.tol);
    const auto validation = validate_scale(ctx, cfg.n_grid);
    if (!validation.ok) {
        throw std::invalid_argument("moderate deviation scale invalid: " +
                                    scale_condition_text(ctx.beta));
    }

    std::vector<SimulationRow> rows;
    rows.reserve(cfg.n_grid.size());
    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const std::uint64_t n = cfg.n_grid[ni];
        const CountableDistribution dist = cfg.dists.at(n);
        const double theta_n = theta(cfg.family, dist, cfg.tol);
        const double sigma_n =
            std::sqrt(population_sigma_sq(dist, cfg.family, cfg.tol));
        const auto sums = replicate_sums(dist, cfg.family, n, cfg.replicates,
                                         cfg.master_seed, ni, cfg.threads, false);
        std::vector<double> theta_hats(cfg.replicates);
        for (std::uint64_t j = 0; j < cfg.replicates; ++j) {
            theta_hats[j] = apply_transform(cfg.family, sums.base[j]);
        }
        KahanSum mean_acc;
        for (double v : theta_hats) mean_acc.add(v);
        const double mean = mean_acc.value() / static_cast<double>(cfg.replicates);
        KahanSum var_acc;
        for (double v : theta_hats) var_acc.add((v - mean) * (v - mean));
        const double sd =
            std::sqrt(var_acc.value() / static_cast<double>(cfg.replicates));
        const double root_n = std::sqrt(static_cast<double>(n));
        std::vector<double> z(cfg.replicates);
        for (std::uint64_t j = 0; j < cfg.replicates; ++j) {
            z[j] = root_n * (theta_hats[j] - theta_n) / sigma_n;
        }
        rows.push_back(SimulationRow{n, cfg.scale.b(n), theta_n, sigma_n, mean, sd,
                                     ks_to_standard_normal(std::move(z))});
    }
    return rows;
}

std::vector<std::pair<double, double>> exact_plugin_distribution(
    const CountableDistribution& dist, const IndexFamily& family, std::uint64_t n) {
    const std::uint64_t k = dist.support_size();
    if (k == 0 || k > 4 || n == 0 || n > 12) {
        throw std::invalid_argument(
            "instance too large for exact enumeration (need finite support <= 4, n <= 12)");
    }
    std::vector<double> probs(k);
    for (std::uint64_t i = 0; i < k; ++i) probs[i] = dist.mass(i + 1);

    double fact[13];
    fact[0] = 1.0;
    for (int i = 1; i <= 12; ++i) fact[i] = fact[i - 1] * i;

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<std::pair<double, double>> outcomes;
    std::vector<std::uint64_t> counts(k, 0);

    auto emit = [&]() {
        double coeff = fact[n];
        double pmass = 1.0;
        double base = 0.0;
        for (std::uint64_t i = 0; i < k; ++i) {
            coeff /= fact[counts[i]];
            pmass *= std::pow(probs[i], static_cast<double>(counts[i]));
            base += g_eval(family, static_cast<double>(counts[i]) * inv_n);
        }
        outcomes.emplace_back(apply_transform(family, base), coeff * pmass);
    };

    // enumerate all compositions of n over k letters
    auto recurse = [&](auto&& self, std::uint64_t letter, std::uint64_t remaining) -> void {
        if (letter == k - 1) {
            counts[letter] = remaining;
            emit();
            return;
        }
        for (std::uint64_t c = 0; c <= remaining; ++c) {
            counts[letter] = c;
            self(self, letter + 1, remaining - c);
        }
    };
    recurse(recurse, 0, n);

    std::sort(outcomes.begin(), outcomes.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [value, prob] : outcomes) {
        if (!merged.empty() && merged.back().first == value) {
            merged.back().second += prob;
        } else {
            merged.emplace_back(value, prob);
        }
    }
    return merged;
}

double clt_diagnostic(const CountableDistribution& dist, const IndexFamily& family,
                      std::uint64_t n, std::uint64_t replicates, std::uint64_t seed,
                      bool studentized, unsigned threads, double tol) {
    if (replicates == 0) throw std::invalid_argument("replicates must be positive");
    const double s2 = population_sigma_sq(dist, family, tol);
    if (!(s2 > 0.0)) throw std::domain_error("degenerate variance");
    const double sigma = std::sqrt(s2);
    const double theta_pop = theta(family, dist, tol);
    const auto sums =
        replicate_sums(dist, family, n, replicates, seed, 0, threads, studentized);
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> z(replicates);
    for (std::uint64_t j = 0; j < replicates; ++j) {
        const double diff = apply_transform(family, sums.base[j]) - theta_pop;
        const double denom = studentized ? std::sqrt(sums.sigma_sq[j]) : sigma;
        if (denom > 0.0) {
            z[j] = root_n * diff / denom;
        } else {
            z[j] = diff == 0.0 ? 0.0
                               : std::copysign(
                                     std::numeric_limits<double>::infinity(), diff);
        }
    }
    return ks_to_standard_normal(std::move(z));
}

RemainderReport remainder_diagnostic(const CountableDistribution& dist,
                                     const IndexFamily& family, std::uint64_t n,
                                     std::uint64_t replicates, std::uint64_t seed,
                                     const MdpScaleSpec& scale, double tol,
                                     unsigned threads) {
    if (family.transform() != Transform::Renyi &&
        family.transform() != Transform::Hill) {
        throw std::invalid_argument(
            "remainder diagnostic applies to the Renyi and Hill transforms");
    }
    if (replicates == 0) throw std::invalid_argument("replicates must be positive");
    const double h = base_index_sum(family, dist, tol);
    const double t_h = apply_transform(family, h);
    const double t_prime = transform_derivative(family, h);
    const auto sums = replicate_sums(dist, family, n, replicates, seed, 0, threads, false);
    const double factor = std::sqrt(static_cast<double>(n)) / scale.b(n);
    KahanSum mean_acc;
    double max_scaled = 0.0;
    for (std::uint64_t j = 0; j < replicates; ++j) {
        const double h_hat = sums.base[j];
        const double remainder =
            apply_transform(family, h_hat) - t_h - t_prime * (h_hat - h);
        const double scaled = factor * std::fabs(remainder);
        mean_acc.add(scaled);
        max_scaled = std::max(max_scaled, scaled);
    }
    return RemainderReport{mean_acc.value() / static_cast<double>(replicates),
                           max_scaled};
}

}  // namespace divmdp
