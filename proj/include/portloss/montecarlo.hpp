#ifndef PORTLOSS_MONTECARLO_HPP
#define PORTLOSS_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "portloss/continuous.hpp"
#include "portloss/errors.hpp"
#include "portloss/jump.hpp"
#include "portloss/model.hpp"
#include "portloss/rng.hpp"

namespace portloss {

struct SimConfig {
    enum class Mode { Limiting, Finite };

    std::size_t samples = 1'000'000;
    std::uint64_t seed = 42;
    /// Worker hint only: results are bit-identical for any value because each
    /// sample index owns its own counter-based substream.
    unsigned workers = std::thread::hardware_concurrency();
    Mode mode = Mode::Limiting;
    int portfolio_size = 100; // used in Finite mode
    std::vector<double> percentiles = {0.90, 0.95, 0.975, 0.99};

    void validate() const {
        if (samples == 0) throw validation_error("SimConfig: sample count must be > 0");
        if (mode == Mode::Finite && portfolio_size < 1)
            throw validation_error("SimConfig: portfolio size must be >= 1");
        for (double nu : percentiles)
            if (!(nu > 0.0 && nu < 1.0))
                throw validation_error("SimConfig: percentile levels must lie in (0,1)");
    }
};

/// Seeded sample set with the summaries the oracle comparisons need.
struct SimResult {
    struct Quantile {
        double nu = 0.0;
        double value = 0.0;
        double se = 0.0;
    };

    std::vector<double> samples; // sorted nondecreasing
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;
    double variance_se = 0.0;
    std::vector<Quantile> percentiles;
    std::vector<Quantile> shortfalls;

    double ecdf(double x) const {
        const auto it = std::upper_bound(samples.begin(), samples.end(), x);
        return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
    }

    /// sup_x |ECDF(x) - F(x)|.  left_cdf supplies the left limit F(x-) so the
    /// statistic stays exact for CDFs with atoms; pass the CDF itself when it
    /// is continuous.
    template <typename F, typename FL>
    double ks_distance(F&& analytic_cdf, FL&& left_cdf) const {
        const double n = static_cast<double>(samples.size());
        double d = 0.0;
        std::size_t i = 0;
        while (i < samples.size()) {
            std::size_t j = i;
            while (j < samples.size() && samples[j] == samples[i]) ++j;
            const double fx = analytic_cdf(samples[i]);
            const double fxl = left_cdf(samples[i]);
            d = std::max(d, std::abs(fx - static_cast<double>(j) / n));
            d = std::max(d, std::abs(fxl - static_cast<double>(i) / n));
            i = j;
        }
        return d;
    }

    template <typename F>
    double ks_distance(F&& analytic_cdf) const {
        return ks_distance(analytic_cdf, analytic_cdf);
    }
};

/// Loss-law CDF extended to the closed support [0,1].  Conditional losses
/// within one ulp of 1 sample as exactly 1.0, where the distribution function
/// is 1; without the endpoint convention a KS comparison would misread that
/// saturated mass as disagreement.
template <typename Law>
std::function<double(double)> support_cdf(const Law& law) {
    return [law](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return law.limiting_cdf(x);
    };
}

/// Left limit companion of support_cdf: evaluates at the representable left
/// neighbor of x (the relevant notion next to saturated or atomic ties).
template <typename Law>
std::function<double(double)> support_cdf_left(const Law& law) {
    return [law](double x) {
        const double shifted = std::nextafter(x, 0.0);
        if (shifted <= 0.0) return 0.0;
        if (shifted >= 1.0) return 1.0;
        return law.limiting_cdf(clamp_probability(shifted));
    };
}

/// Lower order statistic at rank ceil(nu * N).
inline double empirical_percentile(const SimResult& result, double nu) {
    if (!(nu > 0.0 && nu < 1.0))
        throw validation_error("empirical_percentile: nu must lie in (0,1)");
    const std::size_t n = result.samples.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(nu * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return result.samples[rank - 1];
}

/// Average of the samples strictly above the empirical percentile rank.
inline double empirical_shortfall(const SimResult& result, double nu) {
    const std::size_t n = result.samples.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(nu * static_cast<double>(n)));
    if (rank >= n) return result.samples[n - 1];
    double acc = 0.0;
    for (std::size_t i = rank; i < n; ++i) acc += result.samples[i];
    return acc / static_cast<double>(n - rank);
}

namespace detail {

/// Fill out[i] = fn(i) for i in [0, n), split over cfg.workers threads.
/// Writes go to disjoint ranges, so scheduling cannot affect the result.
template <typename Fn>
void fill_indexed(std::vector<double>& out, std::size_t n, unsigned workers, Fn&& fn) {
    out.resize(n);
    const unsigned nw = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (nw == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nw);
    const std::size_t chunk = (n + nw - 1) / nw;
    for (unsigned w = 0; w < nw; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&out, &fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline SimResult summarize(std::vector<double>&& samples, const SimConfig& cfg) {
    std::sort(samples.begin(), samples.end());
    SimResult r;
    r.samples = std::move(samples);
    const std::size_t n = r.samples.size();
    const double dn = static_cast<double>(n);

    if (r.samples.front() == r.samples.back()) {
        // degenerate sample set: keep the summaries exact
        r.mean = r.samples.front();
        for (double nu : cfg.percentiles) {
            r.percentiles.push_back({nu, r.mean, 0.0});
            r.shortfalls.push_back({nu, r.mean, 0.0});
        }
        return r;
    }

    double acc = 0.0;
    for (double v : r.samples) acc += v;
    r.mean = acc / dn;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : r.samples) {
        const double d = v - r.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    r.variance = n > 1 ? m2 / (dn - 1.0) : 0.0;
    r.mean_se = std::sqrt(r.variance / dn);
    // SE of the sample variance from the fourth central moment.
    const double m2n = m2 / dn;
    const double var_of_var = std::max(0.0, m4 / dn - m2n * m2n);
    r.variance_se = std::sqrt(var_of_var / dn);

    for (double nu : cfg.percentiles) {
        SimResult::Quantile q;
        q.nu = nu;
        q.value = empirical_percentile(r, nu);
        // order-statistic bracket: half-width of the +-1 sd binomial rank band
        const double half = std::sqrt(dn * nu * (1.0 - nu));
        const std::size_t rank = static_cast<std::size_t>(std::ceil(nu * dn));
        const std::size_t lo = rank > static_cast<std::size_t>(half) + 1
                                   ? rank - static_cast<std::size_t>(half) - 1
                                   : 0;
        const std::size_t hi = std::min(n - 1, rank + static_cast<std::size_t>(half));
        q.se = 0.5 * (r.samples[hi] - r.samples[lo]);
        r.percentiles.push_back(q);

        SimResult::Quantile es;
        es.nu = nu;
        es.value = empirical_shortfall(r, nu);
        es.se = q.se; // same order of magnitude; reported as indicative only
        r.shortfalls.push_back(es);
    }
    return r;
}

} // namespace detail

/// Samples of the limiting loss: the conditional default probability
/// evaluated at a fresh aggregate factor draw per sample.
inline SimResult sample_limiting_loss(const ContinuousLossLaw& law, const SimConfig& cfg) {
    cfg.validate();
    const DerivedParams& d = law.derived();
    if (d.zeta == 0.0) throw degenerate_error("sample_limiting_loss: zeta = 0");

    const double a = d.Sigma * std_normal_quantile(clamp_probability(d.p)) / d.zeta;
    const double b = d.Lambda / d.zeta;
    std::vector<double> out;
    detail::fill_indexed(out, cfg.samples, cfg.workers, [&](std::size_t i) {
        if (b == 0.0) return d.p; // deterministic limit
        PhiloxStream rng(cfg.seed, i);
        return std_normal_cdf(a - b * rng.normal());
    });
    return detail::summarize(std::move(out), cfg);
}

inline SimResult sample_limiting_loss(const JumpLossLaw& law, const SimConfig& cfg) {
    cfg.validate();
    const DerivedParams& d = law.derived();
    const JumpSpec& jump = law.jump();
    if (d.zeta == 0.0) throw degenerate_error("sample_limiting_loss: zeta = 0");

    const double sqrtT = std::sqrt(d.T);
    const double a = d.Sigma * std_normal_quantile(clamp_probability(d.pTilde)) / d.zeta;
    const double b = d.Lambda / d.zeta;
    const double lt = jump.active() ? jump.lambda * d.T : 0.0;
    std::vector<double> out;
    detail::fill_indexed(out, cfg.samples, cfg.workers, [&](std::size_t i) {
        PhiloxStream rng(cfg.seed, i);
        const double z = b == 0.0 ? 0.0 : rng.normal();
        double s = 0.0;
        if (lt > 0.0) {
            const int count = rng.poisson(lt);
            if (jump.size_law == JumpSpec::SizeLaw::Constant) {
                s = count * jump.c;
            } else {
                for (int k = 0; k < count; ++k) s += rng.exponential(jump.gamma);
            }
        }
        return std_normal_cdf(a - b * z + s / (d.zeta * sqrtT));
    });
    return detail::summarize(std::move(out), cfg);
}

/// Full finite-portfolio simulation: one shared aggregate draw (and jump path)
/// per replication, n idiosyncratic pairs, defaults checked on the exact
/// terminal values.  No path discretization is needed: default is read off at
/// the horizon only.
inline SimResult sample_finite_portfolio(const ContractParams& params, const JumpSpec& jump,
                                         int n, const SimConfig& cfg) {
    cfg.validate();
    params.validate();
    jump.validate();
    if (n < 1) throw validation_error("sample_finite_portfolio: n must be >= 1");

    const double T = params.T;
    const double sqrtT = std::sqrt(T);
    const double drift_a =
        std::log(params.A0) +
        (params.mu + jump.lambda * jump_mean_factor(jump) - 0.5 * params.sigma * params.sigma) * T;
    const double drift_b =
        std::log(params.B0) + (params.alpha - 0.5 * params.beta * params.beta) * T;
    const double sr = std::sqrt(params.rho);
    const double sx = std::sqrt(1.0 - params.rho);
    const double st = std::sqrt(params.theta);
    const double sz = std::sqrt(1.0 - params.theta);
    const double lt = jump.active() ? jump.lambda * T : 0.0;

    std::vector<double> out;
    detail::fill_indexed(out, cfg.samples, cfg.workers, [&](std::size_t i) {
        PhiloxStream rng(cfg.seed, i);
        const double y = rng.normal(); // aggregate factor, Y_T / sqrt(T)
        double j_total = 0.0;
        if (lt > 0.0) {
            const int count = rng.poisson(lt);
            if (jump.size_law == JumpSpec::SizeLaw::Constant) {
                j_total = count * jump.c;
            } else {
                for (int k = 0; k < count; ++k) j_total += rng.exponential(jump.gamma);
            }
        }
        int defaults = 0;
        for (int loan = 0; loan < n; ++loan) {
            const double x = rng.normal();
            const double z = rng.normal();
            const double log_asset = drift_a + params.sigma * sqrtT * (sr * y + sx * x) - j_total;
            const double log_liab = drift_b + params.beta * sqrtT * (st * y + sz * z);
            if (log_asset <= log_liab) ++defaults;
        }
        return static_cast<double>(defaults) / static_cast<double>(n);
    });
    return detail::summarize(std::move(out), cfg);
}

} // namespace portloss

#endif
