#include "cdold/merton.hpp"

#include <cmath>

#include "cdold/special.hpp"
#include "cdold/support.hpp"

namespace cdold {

void GammaVolSpec::validate() const {
    if (!(scale > 0.0 && shape > 0.0))
        throw ConfigError("GammaVolSpec: scale and shape must be positive");
}

double merton_fp_density(const MertonParams& params, double t) {
    if (t <= 0.0) return 0.0;
    const double b = std::log(1.0 / params.K);
    const double nu = params.theta - 0.5 * params.sigma * params.sigma;
    const double s2t = params.sigma * params.sigma * t;
    const double z = nu * t + b;
    return b / std::sqrt(2.0 * M_PI * s2t * t * t) * std::exp(-z * z / (2.0 * s2t));
}

double merton_default_prob(const MertonParams& params, double horizon) {
    if (!(horizon > 0.0)) throw NumericError("merton_default_prob: horizon must be positive");
    const double b = std::log(1.0 / params.K);
    if (b <= 0.0) return 1.0;  // barrier at the initial value: immediate default

    // The passage density is sharply peaked near t* = b/|nu| and can be far
    // below the tolerance at coarse probe points, so the range is seeded
    // with geometric subintervals before the adaptive refinement.
    static const double seeds[] = {1e-12, 1e-8, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.25, 1.0};
    std::vector<double> cuts = {1e-12};
    for (double s : seeds)
        if (s > cuts.back() && s < horizon) cuts.push_back(s);
    cuts.push_back(horizon);

    auto f = [&](double t) { return merton_fp_density(params, t); };
    const double tol = 1e-10 / (cuts.size() - 1);
    NeumaierSum total;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        total.add(adaptive_simpson(f, cuts[i - 1], cuts[i], tol));
    return std::min(std::max(total.value(), 0.0), 1.0);
}

double merton_default_prob_closed(const MertonParams& params, double horizon) {
    if (!(horizon > 0.0)) throw NumericError("merton_default_prob_closed: horizon must be positive");
    const double b = std::log(1.0 / params.K);
    if (b <= 0.0) return 1.0;
    const double nu = params.theta - 0.5 * params.sigma * params.sigma;
    const double sq = params.sigma * std::sqrt(horizon);
    double v = norm_cdf((-b - nu * horizon) / sq) +
               std::exp(-2.0 * nu * b / (params.sigma * params.sigma)) *
                   norm_cdf((-b + nu * horizon) / sq);
    return std::min(std::max(v, 0.0), 1.0);
}

double gamma_inverse_cdf(const GammaVolSpec& spec, double u) {
    spec.validate();
    if (!(u > 0.0 && u < 1.0)) throw NumericError("gamma_inverse_cdf: u must lie in (0,1)");
    return spec.scale * gamma_p_inv(spec.shape, u);
}

PoolSpec build_gamma_merton_pool(const GammaVolSpec& spec, double theta, double K, int N,
                                 double horizon) {
    spec.validate();
    if (N < 1) throw ConfigError("build_gamma_merton_pool: N must be >= 1");
    (void)horizon;
    PoolSpec pool;
    pool.names.reserve(N);
    for (int n = 1; n <= N; ++n) {
        double u = static_cast<double>(n) / (N + 1.0);
        MertonParams mp;
        mp.theta = theta;
        mp.K = K;
        mp.sigma = gamma_inverse_cdf(spec, u);
        pool.names.push_back(DefaultDistribution::merton(mp));
    }
    return pool;
}

LossProbMeasure limiting_measure(const GammaVolSpec& spec, double theta, double K, double horizon,
                                 int n_quad) {
    spec.validate();
    if (n_quad < 8) throw NumericError("limiting_measure: n_quad must be >= 8");

    const double q_cut = 1e-9;
    const double lo = gamma_inverse_cdf(spec, q_cut);
    const double hi = gamma_inverse_cdf(spec, 1.0 - q_cut);
    const double outside =
        gamma_p(spec.shape, lo / spec.scale) + (1.0 - gamma_p(spec.shape, hi / spec.scale));
    if (outside > 1e-8)
        throw NumericError("limiting_measure: truncation leaves more than 1e-8 gamma mass outside");

    QuadratureRule rule = gauss_legendre(n_quad);
    std::vector<LossProbMeasure::Atom> atoms;
    atoms.reserve(n_quad);
    NeumaierSum wsum;
    std::vector<double> raw_w(n_quad);
    for (int j = 0; j < n_quad; ++j) {
        double sigma = 0.5 * (hi - lo) * rule.nodes[j] + 0.5 * (hi + lo);
        double dens = std::pow(sigma, spec.shape - 1.0) * std::exp(-sigma / spec.scale) /
                      (std::pow(spec.scale, spec.shape) * std::tgamma(spec.shape));
        raw_w[j] = 0.5 * (hi - lo) * rule.weights[j] * dens;
        wsum.add(raw_w[j]);
    }
    const double norm = wsum.value();
    for (int j = 0; j < n_quad; ++j) {
        double sigma = 0.5 * (hi - lo) * rule.nodes[j] + 0.5 * (hi + lo);
        MertonParams mp;
        mp.theta = theta;
        mp.K = K;
        mp.sigma = sigma;
        atoms.push_back({merton_default_prob(mp, horizon), raw_w[j] / norm});
    }
    return LossProbMeasure(std::move(atoms));
}

}  // namespace cdold
