#include "cdold/asymptotics.hpp"

#include <cmath>

#include "cdold/support.hpp"

namespace cdold {

double granularity(long N, double alpha) {
    double na = static_cast<double>(N) * alpha;
    double nearest = std::round(na);
    if (std::abs(na - nearest) < 1e-9) return 0.0;
    return std::ceil(na) - na;
}

double i2_factor(double lambda, double g) {
    if (!(lambda > 0.0)) throw AssumptionError("i2_factor: requires a positive multiplier");
    if (!(g >= 0.0 && g < 1.0)) throw NumericError("i2_factor: granularity outside [0,1)");
    double e = std::exp(-lambda);
    double d = 1.0 - e;
    return std::exp(-lambda * g) * (e / (d * d) + g / d);
}

double premium_leg(const TrancheSpec& tranche) {
    NeumaierSum s;
    for (double t : tranche.premium_dates) s.add(std::exp(-tranche.rate * t));
    return s.value();
}

namespace {

AsymptoticResult assemble(const RateSolution& pre, double rate_exponent, const TrancheSpec& tranche,
                          long N, PrefactorMeasure mode) {
    if (!pre.usable() || !(pre.lambda > 0.0)) {
        if (pre.boundary == RateBoundary::infeasible)
            throw AssumptionError(
                "protection leg: alpha is infeasible for the pool measure (non-degeneracy)");
        if (pre.boundary == RateBoundary::degenerate_mu_dagger)
            throw AssumptionError("protection leg: degenerate two-point pool measure");
        throw AssumptionError(
            "protection leg: multiplier is not positive (investment-grade assumption fails: "
            "mean default probability >= alpha)");
    }
    if (!(pre.sigma_sq > 0.0))
        throw AssumptionError("protection leg: tilted variance is zero (degenerate support)");

    AsymptoticResult out;
    out.N = N;
    out.granularity = granularity(N, tranche.alpha);
    out.lambda = pre.lambda;
    out.rate = rate_exponent;
    out.sigma_sq = pre.sigma_sq;
    out.i2 = i2_factor(pre.lambda, out.granularity);
    out.prefactor = mode;

    double log_pre = -tranche.rate * tranche.horizon + std::log(out.i2) -
                     1.5 * std::log(static_cast<double>(N)) -
                     std::log(tranche.beta - tranche.alpha) -
                     0.5 * std::log(2.0 * M_PI * pre.sigma_sq);
    out.log_protection_leg = log_pre - static_cast<double>(N) * rate_exponent;
    out.protection_leg = std::exp(out.log_protection_leg);
    out.premium_leg = premium_leg(tranche);
    out.log_spread = out.log_protection_leg - std::log(out.premium_leg);
    out.spread = out.protection_leg / out.premium_leg;
    return out;
}

}  // namespace

AsymptoticResult spread_asymptotic(const LossProbMeasure& pool_measure, const TrancheSpec& tranche,
                                   long N) {
    tranche.validate();
    RateSolution sol = solve_rate(pool_measure, tranche.alpha);
    return assemble(sol, sol.rate, tranche, N, PrefactorMeasure::finite_pool);
}

AsymptoticResult spread_asymptotic(const LossProbMeasure& pool_measure,
                                   const LossProbMeasure& limit_measure,
                                   const TrancheSpec& tranche, long N) {
    tranche.validate();
    RateSolution pre = solve_rate(limit_measure, tranche.alpha);
    RateSolution fin = solve_rate(pool_measure, tranche.alpha);
    if (fin.boundary == RateBoundary::infeasible)
        throw AssumptionError("protection leg: alpha is infeasible for the pool measure");
    return assemble(pre, fin.rate, tranche, N, PrefactorMeasure::limit);
}

double protection_leg_asymptotic(const LossProbMeasure& pool_measure, const TrancheSpec& tranche,
                                 long N) {
    return spread_asymptotic(pool_measure, tranche, N).protection_leg;
}

std::vector<LambdaCurvePoint> lambda_curve(const LossProbMeasure& m,
                                           const std::vector<double>& lambda_grid) {
    std::vector<LambdaCurvePoint> out;
    out.reserve(lambda_grid.size());
    for (double lam : lambda_grid) out.push_back({lam, tilted_mean(m, lam)});
    return out;
}

std::vector<SstarRow> sstar_curve(const std::function<LossProbMeasure(long)>& measure_builder,
                                  const std::optional<LossProbMeasure>& limit_measure,
                                  const TrancheSpec& tranche, const std::vector<long>& n_list) {
    if (n_list.empty()) throw ConfigError("sstar_curve: empty N list");
    std::vector<SstarRow> rows;
    rows.reserve(n_list.size());
    for (long N : n_list) {
        SstarRow row;
        row.N = N;
        try {
            LossProbMeasure mN = measure_builder(N);
            AsymptoticResult res = limit_measure
                                       ? spread_asymptotic(mN, *limit_measure, tranche, N)
                                       : spread_asymptotic(mN, tranche, N);
            row.g = res.granularity;
            row.lambda = res.lambda;
            row.rate = res.rate;
            row.sigma_sq = res.sigma_sq;
            row.sstar = res.spread;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cdold
