#ifndef CDOLD_ASYMPTOTICS_HPP
#define CDOLD_ASYMPTOTICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdold/entropy.hpp"

namespace cdold {

// Which measure fed the pre-exponential factor (multiplier and variance);
// the exponent always uses the finite-pool measure.
enum class PrefactorMeasure { finite_pool, limit };

struct AsymptoticResult {
    long N = 0;
    double granularity = 0.0;  // ceil(N alpha) - N alpha, in [0,1)
    double lambda = 0.0;
    double rate = 0.0;  // evaluated on the finite-pool measure
    double sigma_sq = 0.0;
    double i2 = 0.0;
    double protection_leg = 0.0;      // may underflow to 0 for large N * rate
    double log_protection_leg = 0.0;  // always meaningful
    double premium_leg = 0.0;
    double spread = 0.0;
    double log_spread = 0.0;
    PrefactorMeasure prefactor = PrefactorMeasure::finite_pool;
};

// Lattice offset of the attachment level.  N alpha within 1e-9 of an integer
// snaps to granularity 0 so float noise cannot flip the branch.
double granularity(long N, double alpha);

// exp(-lambda g) * { e^{-lambda}/(1-e^{-lambda})^2 + g/(1-e^{-lambda}) };
// the closed form of the geometric series sum_{s in g+Z>=0} s e^{-lambda s}.
// Requires lambda > 0.
double i2_factor(double lambda, double g);

// Limit value of the expected premium leg: sum over premium dates of e^{-R t}.
double premium_leg(const TrancheSpec& tranche);

// Pre-exponential factor times exp(-N * rate), assembled in log space.
AsymptoticResult spread_asymptotic(const LossProbMeasure& pool_measure, const TrancheSpec& tranche,
                                   long N);

// Same, but multiplier and variance taken from the limiting measure while the
// exponent keeps the finite-pool rate (the mixed form used for theoretical
// price curves).
AsymptoticResult spread_asymptotic(const LossProbMeasure& pool_measure,
                                   const LossProbMeasure& limit_measure,
                                   const TrancheSpec& tranche, long N);

double protection_leg_asymptotic(const LossProbMeasure& pool_measure, const TrancheSpec& tranche,
                                 long N);

struct LambdaCurvePoint {
    double lambda;
    double integral;
};
std::vector<LambdaCurvePoint> lambda_curve(const LossProbMeasure& m,
                                           const std::vector<double>& lambda_grid);

struct SstarRow {
    long N = 0;
    double g = 0.0;
    double lambda = 0.0;
    double rate = 0.0;
    double sigma_sq = 0.0;
    double sstar = 0.0;
    std::string error;  // empty on success
};

// Theoretical spread against pool size.  The builder produces the finite-pool
// measure for each N; when a limiting measure is supplied the prefactor uses
// it (the default curve convention), otherwise everything comes from the
// finite measure.
std::vector<SstarRow> sstar_curve(const std::function<LossProbMeasure(long)>& measure_builder,
                                  const std::optional<LossProbMeasure>& limit_measure,
                                  const TrancheSpec& tranche, const std::vector<long>& n_list);

}  // namespace cdold

#endif
