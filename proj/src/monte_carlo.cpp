#include "cdold/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdold/asymptotics.hpp"
#include "cdold/simd.hpp"
#include "cdold/support.hpp"

namespace cdold {

// ----------------------------------------------------------------------------
// Conditional time sampling
// ----------------------------------------------------------------------------

ConditionalSampler ConditionalSampler::build(const DefaultDistribution& d, double horizon) {
    ConditionalSampler s;
    s.p_horizon = d.default_prob(horizon);
    if (s.p_horizon <= 0.0) return s;  // never invoked for a name that cannot default

    if (!d.is_merton()) {
        // Reuse the tabulated grid up to the horizon, closing it at T-.  An
        // atom at the first grid point becomes a vertical segment (duplicate
        // knot time), which the interpolation in sample() resolves exactly.
        const auto& t = d.grid_times();
        const auto& f = d.grid_cdf();
        s.times.push_back(t.front());
        s.cdf.push_back(0.0);
        if (f.front() > 0.0 && t.front() < horizon) {
            s.times.push_back(t.front());
            s.cdf.push_back(f.front());
        }
        for (std::size_t i = 1; i < t.size() && t[i] < horizon; ++i) {
            s.times.push_back(t[i]);
            s.cdf.push_back(f[i]);
        }
        s.times.push_back(horizon);
        s.cdf.push_back(s.p_horizon);
        return s;
    }

    // Merton names: quadratically clustered grid near t = 0 where the
    // passage density concentrates.
    const int cells = 512;
    s.times.resize(cells + 1);
    s.cdf.resize(cells + 1);
    for (int j = 0; j <= cells; ++j) {
        double x = static_cast<double>(j) / cells;
        double t = horizon * x * x;
        s.times[j] = t;
        s.cdf[j] = d.cdf_left(t);
    }
    s.cdf[cells] = s.p_horizon;
    return s;
}

double ConditionalSampler::sample(double u) const {
    double target = u * p_horizon;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.begin()) return times.front();
    if (it == cdf.end()) --it;
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    double f0 = cdf[i - 1], f1 = cdf[i];
    double t0 = times[i - 1], t1 = times[i];
    return f1 > f0 ? t0 + (t1 - t0) * (target - f0) / (f1 - f0) : t0;
}

// ----------------------------------------------------------------------------
// Tilting
// ----------------------------------------------------------------------------

TiltedPool tilt_pool(const PoolSpec& pool, const TrancheSpec& tranche) {
    pool.validate();
    tranche.validate();

    LossProbMeasure m = build_loss_measure(pool, tranche.horizon);
    RateSolution sol = solve_rate(m, tranche.alpha);
    if (sol.boundary != RateBoundary::interior)
        throw AssumptionError(
            "tilt_pool: the multiplier is not interior; boundary tilts cannot be simulated");

    TiltedPool tp;
    tp.alpha = tranche.alpha;
    tp.horizon = tranche.horizon;
    tp.lambda = sol.lambda;
    tp.rate = sol.rate;
    tp.base_probs.resize(pool.names.size());
    for (std::size_t n = 0; n < pool.names.size(); ++n)
        tp.base_probs[n] = pool.names[n].default_prob(tranche.horizon);
    tp.tilted_probs.resize(pool.names.size());
    // Same kernel the solver used, so the per-name mean reproduces alpha to
    // the solver tolerance.
    simd::tilt_batch(tp.base_probs.data(), tp.tilted_probs.data(), tp.base_probs.size(),
                     std::exp(sol.lambda));
    tp.samplers.reserve(pool.names.size());
    for (const auto& name : pool.names)
        tp.samplers.push_back(ConditionalSampler::build(name, tranche.horizon));
    return tp;
}

// ----------------------------------------------------------------------------
// Path sampling and payoff
// ----------------------------------------------------------------------------

namespace {

LossPath sample_path_impl(const std::vector<double>& probs,
                          const std::vector<ConditionalSampler>& samplers, double alpha,
                          const CounterRng& rng, std::uint64_t sample_index) {
    LossPath path;
    const std::size_t N = probs.size();
    for (std::size_t n = 0; n < N; ++n) {
        if (probs[n] <= 0.0) continue;
        double u = rng.uniform(sample_index, n, 0);
        if (u < probs[n]) path.times.push_back(samplers[n].sample(rng.uniform(sample_index, n, 1)));
    }
    std::sort(path.times.begin(), path.times.end());
    path.gamma = static_cast<double>(path.times.size()) - static_cast<double>(N) * alpha;
    return path;
}

}  // namespace

LossPath sample_loss_path(const PoolSpec& pool, const TrancheSpec& tranche, const CounterRng& rng,
                          std::uint64_t sample_index) {
    std::vector<double> probs(pool.names.size());
    std::vector<ConditionalSampler> samplers;
    samplers.reserve(pool.names.size());
    for (std::size_t n = 0; n < pool.names.size(); ++n) {
        probs[n] = pool.names[n].default_prob(tranche.horizon);
        samplers.push_back(ConditionalSampler::build(pool.names[n], tranche.horizon));
    }
    return sample_path_impl(probs, samplers, tranche.alpha, rng, sample_index);
}

LossPath sample_loss_path(const TiltedPool& tilted, const CounterRng& rng,
                          std::uint64_t sample_index) {
    return sample_path_impl(tilted.tilted_probs, tilted.samplers, tilted.alpha, rng, sample_index);
}

double protection_payoff(const LossPath& path, const TrancheSpec& tranche, long N) {
    const double width = tranche.beta - tranche.alpha;
    auto tranche_loss = [&](double loss) {
        return (std::max(loss - tranche.alpha, 0.0) - std::max(loss - tranche.beta, 0.0)) / width;
    };
    NeumaierSum s;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        double before = tranche_loss(static_cast<double>(k) / N);
        double after = tranche_loss(static_cast<double>(k + 1) / N);
        if (after > before) s.add(std::exp(-tranche.rate * path.times[k]) * (after - before));
    }
    return s.value();
}

// ----------------------------------------------------------------------------
// Estimators
// ----------------------------------------------------------------------------

namespace {

constexpr std::int64_t kBlock = 8192;  // fixed block size: worker-count independent reductions

struct MomentAccumulator {
    NeumaierSum sum;
    NeumaierSum sum_sq;
};

// Runs fn(sample_index) over the sample range in fixed blocks and returns
// (mean, standard error) reduced in block order.
template <class F>
std::pair<double, double> mc_moments(long n_samples, F&& fn) {
    const std::int64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
    std::vector<MomentAccumulator> acc(n_blocks);
    parallel_blocks(n_samples, kBlock, [&](std::int64_t blk, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            double v = fn(static_cast<std::uint64_t>(i));
            acc[blk].sum.add(v);
            acc[blk].sum_sq.add(v * v);
        }
    });
    NeumaierSum total, total_sq;
    for (const auto& a : acc) {
        total.add(a.sum.value());
        total_sq.add(a.sum_sq.value());
    }
    double n = static_cast<double>(n_samples);
    double mean = total.value() / n;
    double var = std::max(total_sq.value() / n - mean * mean, 0.0);
    double se = std::sqrt(var / n);
    return {mean, se};
}

}  // namespace

McEstimate estimate_protection_is(const PoolSpec& pool, const TrancheSpec& tranche, long n_samples,
                                  std::uint64_t seed) {
    TiltedPool tp = tilt_pool(pool, tranche);
    const long N = tp.size();
    CounterRng rng(seed);

    auto [pre_mean, pre_se] = mc_moments(n_samples, [&](std::uint64_t i) {
        LossPath path = sample_loss_path(tp, rng, i);
        if (!(path.gamma > 0.0)) return 0.0;
        return protection_payoff(path, tranche, N) * std::exp(-tp.lambda * path.gamma);
    });
    if (!(pre_mean > 0.0))
        throw NumericError(
            "estimate_protection_is: no sample produced a positive weight; the tilted mean of the "
            "loss should straddle alpha, so this indicates far too few samples");

    McEstimate est;
    est.kind = EstimatorKind::importance;
    est.n_samples = n_samples;
    est.seed = seed;
    est.pre_exp_mean = pre_mean;
    est.pre_exp_se = pre_se;
    est.exponent = static_cast<double>(N) * tp.rate;
    est.log_mean = std::log(pre_mean) - est.exponent;
    est.mean = std::exp(est.log_mean);
    est.standard_error = pre_se * std::exp(-est.exponent);
    return est;
}

McEstimate estimate_protection_plain(const PoolSpec& pool, const TrancheSpec& tranche,
                                     long n_samples, std::uint64_t seed) {
    pool.validate();
    tranche.validate();
    const long N = pool.size();
    std::vector<double> probs(pool.names.size());
    std::vector<ConditionalSampler> samplers;
    samplers.reserve(pool.names.size());
    for (std::size_t n = 0; n < pool.names.size(); ++n) {
        probs[n] = pool.names[n].default_prob(tranche.horizon);
        samplers.push_back(ConditionalSampler::build(pool.names[n], tranche.horizon));
    }
    CounterRng rng(seed);
    auto [mean, se] = mc_moments(n_samples, [&](std::uint64_t i) {
        LossPath path = sample_path_impl(probs, samplers, tranche.alpha, rng, i);
        return protection_payoff(path, tranche, N);
    });

    McEstimate est;
    est.kind = EstimatorKind::plain;
    est.n_samples = n_samples;
    est.seed = seed;
    est.mean = mean;
    est.standard_error = se;
    est.log_mean = mean > 0.0 ? std::log(mean) : -std::numeric_limits<double>::infinity();
    return est;
}

// ----------------------------------------------------------------------------
// Exact count distribution and its CLT comparison
// ----------------------------------------------------------------------------

std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs) {
    if (probs.size() > 100000) throw NumericError("poisson_binomial_pmf: N capped at 1e5");
    std::vector<double> pmf(probs.size() + 1, 0.0);
    pmf[0] = 1.0;
    std::size_t n = 0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw NumericError("poisson_binomial_pmf: probability outside [0,1]");
        simd::pb_convolve_step(pmf.data(), ++n, p);
    }
    NeumaierSum total;
    for (double v : pmf) total.add(v);
    if (std::abs(total.value() - 1.0) > 1e-10)
        throw NumericError("poisson_binomial_pmf: mass check failed");
    return pmf;
}

double local_clt_max_error(const std::vector<double>& tilted_probs, double alpha, long N) {
    if (static_cast<long>(tilted_probs.size()) != N)
        throw NumericError("local_clt_max_error: probability count must equal N");
    NeumaierSum var;
    for (double u : tilted_probs) var.add(u * (1.0 - u));
    const double sigma2 = var.value() / N;
    if (!(sigma2 > 0.0)) throw NumericError("local_clt_max_error: zero tilted variance");

    std::vector<double> pmf = poisson_binomial_pmf(tilted_probs);
    const double g = granularity(N, alpha);
    const long k0 = static_cast<long>(std::llround(N * alpha + g));
    const double smax = std::pow(static_cast<double>(N), 0.25);
    const double ref = 1.0 / std::sqrt(2.0 * M_PI * N * sigma2);

    double worst = 0.0;
    for (long j = 0;; ++j) {
        double s = g + static_cast<double>(j);
        if (s > smax || k0 + j > N) break;
        worst = std::max(worst, std::abs(pmf[k0 + j] / ref - 1.0));
    }
    return worst;
}

std::vector<HnRow> hn_empirical(const PoolSpec& pool, const TrancheSpec& tranche, long n_samples,
                                std::uint64_t seed) {
    TiltedPool tp = tilt_pool(pool, tranche);
    const long N = tp.size();
    const double g = granularity(N, tranche.alpha);
    const double smax = std::pow(static_cast<double>(N), 0.25);
    const long n_bins = static_cast<long>(std::floor(smax - g)) + 1;

    std::vector<NeumaierSum> sums(n_bins);
    std::vector<long> counts(n_bins, 0);
    CounterRng rng(seed);
    for (long i = 0; i < n_samples; ++i) {
        LossPath path = sample_loss_path(tp, rng, static_cast<std::uint64_t>(i));
        if (!(path.gamma > 0.0)) continue;
        double off = path.gamma - g;
        long j = std::lround(off);
        if (std::abs(off - j) > 1e-6 || j < 0 || j >= n_bins) continue;
        sums[j].add(protection_payoff(path, tranche, N));
        ++counts[j];
    }

    std::vector<HnRow> rows;
    rows.reserve(n_bins);
    for (long j = 0; j < n_bins; ++j) {
        HnRow row;
        row.s = g + static_cast<double>(j);
        if (row.s <= 0.0) continue;  // conditioning is on gamma > 0
        row.count = counts[j];
        row.enough = counts[j] >= 30;
        row.empirical = counts[j] > 0 ? sums[j].value() / counts[j] : 0.0;
        row.reference = std::exp(-tranche.rate * tranche.horizon) * row.s /
                        (N * (tranche.beta - tranche.alpha));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cdold
