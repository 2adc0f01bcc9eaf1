#include "cdold/default_dist.hpp"

#include <algorithm>
#include <cmath>

#include "cdold/special.hpp"
#include "cdold/support.hpp"

namespace cdold {

namespace {

// P(first passage <= t) for drifted Brownian log-value hitting the barrier:
// with b = ln(1/K) and nu = theta - sigma^2/2,
//   N((-b - nu t)/(sigma sqrt t)) + exp(-2 nu b / sigma^2) N((-b + nu t)/(sigma sqrt t)).
double merton_passage_cdf(const MertonParams& mp, double t) {
    if (t <= 0.0) return 0.0;
    const double b = std::log(1.0 / mp.K);
    if (b <= 0.0) return 1.0;  // barrier at (or above) the initial value
    const double nu = mp.theta - 0.5 * mp.sigma * mp.sigma;
    const double sq = mp.sigma * std::sqrt(t);
    const double reflect = std::exp(-2.0 * nu * b / (mp.sigma * mp.sigma));
    double v = norm_cdf((-b - nu * t) / sq) + reflect * norm_cdf((-b + nu * t) / sq);
    return std::min(std::max(v, 0.0), 1.0);
}

}  // namespace

void MertonParams::validate() const {
    if (!(K > 0.0 && K < 1.0)) throw ConfigError("MertonParams: barrier K must lie in (0,1)");
    if (!(sigma > 0.0)) throw ConfigError("MertonParams: volatility must be positive");
    if (!std::isfinite(theta)) throw ConfigError("MertonParams: drift must be finite");
}

DefaultDistribution DefaultDistribution::tabulated(std::vector<double> times,
                                                   std::vector<double> cdf, double tail_mass) {
    if (times.empty() || times.size() != cdf.size())
        throw ConfigError("tabulated distribution: grid and CDF sizes must match and be nonempty");
    if (times.front() < 0.0) throw ConfigError("tabulated distribution: negative grid time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ConfigError("tabulated distribution: grid must be strictly increasing");
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        if (cdf[i] < -1e-12 || cdf[i] > 1.0 + 1e-12)
            throw ConfigError("tabulated distribution: CDF value outside [0,1]");
        if (i > 0 && cdf[i] < cdf[i - 1] - 1e-12)
            throw ConfigError("tabulated distribution: CDF must be nondecreasing");
    }
    if (tail_mass < -1e-12) throw ConfigError("tabulated distribution: negative tail mass");
    if (std::abs(cdf.back() + tail_mass - 1.0) > 1e-9)
        throw ConfigError("tabulated distribution: CDF end plus tail mass must equal 1");

    DefaultDistribution d;
    d.times_ = std::move(times);
    d.cdf_ = std::move(cdf);
    d.tail_mass_ = std::max(tail_mass, 0.0);
    return d;
}

DefaultDistribution DefaultDistribution::merton(const MertonParams& params) {
    params.validate();
    DefaultDistribution d;
    d.merton_ = params;
    const double b = std::log(1.0 / params.K);
    const double nu = params.theta - 0.5 * params.sigma * params.sigma;
    d.tail_mass_ = nu > 0.0 ? 1.0 - std::exp(-2.0 * nu * b / (params.sigma * params.sigma)) : 0.0;
    return d;
}

double DefaultDistribution::cdf(double t) const {
    if (merton_) return merton_passage_cdf(*merton_, t);
    if (t < times_.front()) return 0.0;
    if (t >= times_.back()) return cdf_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    double t0 = times_[i - 1], t1 = times_[i];
    double f0 = cdf_[i - 1], f1 = cdf_[i];
    return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
}

double DefaultDistribution::cdf_left(double t) const {
    if (t <= 0.0) return 0.0;
    if (!merton_ && t <= times_.front()) return 0.0;  // atom at the first grid point excluded
    return cdf(t);
}

double DefaultDistribution::window_prob(double a, double b) const {
    if (b <= a) return 0.0;
    double v = cdf_left(b) - cdf_left(a);
    return std::max(v, 0.0);
}

double DefaultDistribution::default_prob(double horizon) const { return cdf_left(horizon); }

double DefaultDistribution::inverse_cdf(double u, double horizon) const {
    if (!(u >= 0.0 && u < 1.0)) throw NumericError("inverse_cdf: u must lie in [0,1)");
    const double pt = default_prob(horizon);
    if (pt <= 0.0) throw NumericError("inverse_cdf: no default mass before the horizon");
    const double target = u * pt;

    if (merton_) {
        double lo = 0.0, hi = horizon;
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (lo + hi);
            if (merton_passage_cdf(*merton_, mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        return std::min(lo, std::nextafter(horizon, 0.0));
    }

    // Possible atom at time 0 (grid starting at t=0 with positive CDF).
    if (times_.front() == 0.0 && target < cdf_.front()) return 0.0;
    // Binary search on grid values, then linear inversion within the segment.
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), target);
    if (it == cdf_.begin()) return times_.front();
    if (it == cdf_.end()) it = cdf_.end() - 1;
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    double f0 = cdf_[i - 1], f1 = cdf_[i];
    double t0 = times_[i - 1], t1 = times_[i];
    double t = f1 > f0 ? t0 + (t1 - t0) * (target - f0) / (f1 - f0) : t0;
    return std::min(t, std::nextafter(horizon, 0.0));
}

double DefaultDistribution::tail_mass() const { return tail_mass_; }

void PoolSpec::validate() const {
    if (names.empty()) throw ConfigError("pool must contain at least one name");
}

void TrancheSpec::validate() const {
    if (!(alpha > 0.0 && alpha < beta && beta <= 1.0))
        throw ConfigError("tranche: need 0 < alpha < beta <= 1");
    if (rate < 0.0) throw ConfigError("tranche: negative interest rate");
    if (!(horizon > 0.0)) throw ConfigError("tranche: horizon must be positive");
    if (premium_dates.empty()) throw ConfigError("tranche: premium dates must be nonempty");
    double prev = 0.0;
    for (double t : premium_dates) {
        if (!(t > 0.0 && t <= horizon))
            throw ConfigError("tranche: premium dates must lie in (0, horizon]");
        if (t < prev) throw ConfigError("tranche: premium dates must be sorted");
        prev = t;
    }
}

}  // namespace cdold
