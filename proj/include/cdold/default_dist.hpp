#ifndef CDOLD_DEFAULT_DIST_HPP
#define CDOLD_DEFAULT_DIST_HPP

#include <optional>
#include <vector>

namespace cdold {

// First-passage structural model: firm value starts at 1, drifts at theta
// per year with volatility sigma per sqrt-year, defaults when it reaches the
// barrier K in (0,1).  Any mass the passage law leaves beyond every finite
// horizon sits at +infinity (the name never defaults).
struct MertonParams {
    double theta = 0.0;
    double K = 0.5;
    double sigma = 0.2;

    void validate() const;
};

// Risk-neutral law of a single name's default time on [0, +inf].
//
// Two representations:
//  - tabulated: strictly increasing time grid with CDF values, linear
//    interpolation in between, flat after the last point, and an explicit
//    mass at +infinity (never a float sentinel in the grid);
//  - parametric Merton via the closed-form passage probability.
class DefaultDistribution {
  public:
    static DefaultDistribution tabulated(std::vector<double> times, std::vector<double> cdf,
                                         double tail_mass);
    static DefaultDistribution merton(const MertonParams& params);

    // P(tau <= t) for finite t; right-continuous, 0 for t < 0.
    double cdf(double t) const;

    // P(tau < t): differs from cdf only across the possible atom at time 0.
    double cdf_left(double t) const;

    // mu[a, b)
    double window_prob(double a, double b) const;

    // mu[0, T)
    double default_prob(double horizon) const;

    // Quantile of tau conditioned on default before the horizon:
    // u in [0, 1) -> t in [0, horizon) with cdf_left(t) ~= u * default_prob.
    double inverse_cdf(double u, double horizon) const;

    double tail_mass() const;
    bool is_merton() const { return merton_.has_value(); }
    const MertonParams& merton_params() const { return *merton_; }
    const std::vector<double>& grid_times() const { return times_; }
    const std::vector<double>& grid_cdf() const { return cdf_; }

  private:
    DefaultDistribution() = default;

    std::vector<double> times_;  // tabulated representation
    std::vector<double> cdf_;
    double tail_mass_ = 0.0;
    std::optional<MertonParams> merton_;
};

struct PoolSpec {
    std::vector<DefaultDistribution> names;

    int size() const { return static_cast<int>(names.size()); }
    void validate() const;
};

struct TrancheSpec {
    double alpha = 0.0;                 // attachment fraction
    double beta = 0.0;                  // detachment fraction
    double rate = 0.0;                  // interest rate / year
    double horizon = 0.0;               // contract horizon in years
    std::vector<double> premium_dates;  // sorted, each in (0, horizon]

    void validate() const;
};

}  // namespace cdold

#endif
