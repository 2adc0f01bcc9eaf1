#ifndef CDOLD_MERTON_HPP
#define CDOLD_MERTON_HPP

#include "cdold/loss_measure.hpp"

namespace cdold {

// Gamma law for the cross-sectional volatility distribution.
struct GammaVolSpec {
    double scale = 0.3;
    double shape = 2.0;

    void validate() const;
};

// First-passage density of the default time at t > 0.
double merton_fp_density(const MertonParams& params, double t);

// P(default by T) by adaptive quadrature of the passage density.  The
// density vanishes at t -> 0+ faster than any power, so integration starts
// at 1e-12 with the analytic zero limit used below that.
double merton_default_prob(const MertonParams& params, double horizon);

// Closed-form passage probability (independent check of the quadrature):
// with b = ln(1/K), nu = theta - sigma^2/2,
//   p = N((-b - nu T)/(sigma sqrt T)) + e^{-2 nu b/sigma^2} N((-b + nu T)/(sigma sqrt T)).
double merton_default_prob_closed(const MertonParams& params, double horizon);

// Quantile of the volatility law.
double gamma_inverse_cdf(const GammaVolSpec& spec, double u);

// Pool of N Merton names with volatilities at the quantiles n/(N+1).
// Deterministic: equal inputs produce identical pools.
PoolSpec build_gamma_merton_pool(const GammaVolSpec& spec, double theta, double K, int N,
                                 double horizon);

// Gauss-Legendre discretization of the gamma mixture of passage laws, as a
// measure on default-by-horizon probabilities.  The volatility range is
// truncated at the gamma quantiles [1e-9, 1 - 1e-9] and weights are
// renormalized; more than 1e-8 of gamma mass outside the range is an error.
LossProbMeasure limiting_measure(const GammaVolSpec& spec, double theta, double K, double horizon,
                                 int n_quad);

}  // namespace cdold

#endif
