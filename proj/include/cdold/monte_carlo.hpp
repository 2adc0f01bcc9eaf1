#ifndef CDOLD_MONTE_CARLO_HPP
#define CDOLD_MONTE_CARLO_HPP

#include <cstdint>
#include <vector>

#include "cdold/entropy.hpp"
#include "cdold/rng.hpp"

namespace cdold {

// Per-name inverse-CDF table for default times conditioned on default before
// the horizon.  The conditional law is shared by the base and tilted
// measures (the density ratio is constant on [0, T)).
struct ConditionalSampler {
    std::vector<double> times;
    std::vector<double> cdf;  // unnormalized, ends at the default-by-T probability
    double p_horizon = 0.0;

    static ConditionalSampler build(const DefaultDistribution& d, double horizon);
    double sample(double u) const;  // u in [0,1) -> time in [0, horizon)
};

// Exponentially tilted pool: per-name tilted default probabilities at the
// solved multiplier, plus samplers for the (unchanged) conditional time laws.
struct TiltedPool {
    double alpha = 0.0;
    double horizon = 0.0;
    double lambda = 0.0;
    double rate = 0.0;  // averaged entropy of the tilt; N*rate is the exponent
    std::vector<double> base_probs;
    std::vector<double> tilted_probs;
    std::vector<ConditionalSampler> samplers;

    long size() const { return static_cast<long>(tilted_probs.size()); }
};

// Requires an interior multiplier; boundary tilts cannot be simulated.
TiltedPool tilt_pool(const PoolSpec& pool, const TrancheSpec& tranche);

struct LossPath {
    std::vector<double> times;  // sorted default times in [0, T)
    double gamma = 0.0;         // N (L_{T-} - alpha)
};

LossPath sample_loss_path(const PoolSpec& pool, const TrancheSpec& tranche, const CounterRng& rng,
                          std::uint64_t sample_index);
LossPath sample_loss_path(const TiltedPool& tilted, const CounterRng& rng,
                          std::uint64_t sample_index);

// Discounted tranche-loss increments along the path.
double protection_payoff(const LossPath& path, const TrancheSpec& tranche, long N);

enum class EstimatorKind { plain, importance };

struct McEstimate {
    EstimatorKind kind = EstimatorKind::plain;
    long n_samples = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;            // estimate of E[protection payoff]
    double standard_error = 0.0;  // of `mean`
    double log_mean = 0.0;        // log of `mean`, safe against underflow (IS only)
    double pre_exp_mean = 0.0;    // tilted-measure mean before exp(-N rate)  (IS only)
    double pre_exp_se = 0.0;
    double exponent = 0.0;  // N * rate (IS only)
};

// Importance-sampled estimate: tilted sampling, weight e^{-lambda gamma} on
// {gamma > 0}, exponential factor applied in log space.
McEstimate estimate_protection_is(const PoolSpec& pool, const TrancheSpec& tranche,
                                  long n_samples, std::uint64_t seed);

// Baseline direct estimator under the base measure.
McEstimate estimate_protection_plain(const PoolSpec& pool, const TrancheSpec& tranche,
                                     long n_samples, std::uint64_t seed);

// Exact count distribution of independent non-identical Bernoulli draws;
// O(N^2) convolution, N capped at 1e5.
std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs);

// Desk-scale form of the local CLT: exact P{count = ceil(N alpha) + j}
// against 1/sqrt(2 pi N sigma^2) for offsets with 0 <= s <= N^{1/4};
// returns max |sqrt(2 pi N sigma^2) P - 1|.
double local_clt_max_error(const std::vector<double>& tilted_probs, double alpha, long N);

struct HnRow {
    double s = 0.0;          // gamma value of the bin
    long count = 0;          // samples that landed in the bin
    double empirical = 0.0;  // conditional mean of the protection payoff
    double reference = 0.0;  // e^{-RT} s / (N (beta - alpha))
    bool enough = false;     // at least 30 samples
};

// Conditional means of the protection payoff by exact gamma value under
// tilted sampling, for s <= N^{1/4}.
std::vector<HnRow> hn_empirical(const PoolSpec& pool, const TrancheSpec& tranche, long n_samples,
                                std::uint64_t seed);

}  // namespace cdold

#endif
