#ifndef CDOLD_LOSS_MEASURE_HPP
#define CDOLD_LOSS_MEASURE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "cdold/default_dist.hpp"

namespace cdold {

// Discrete probability measure on [0,1] of default-by-horizon probabilities.
// Atoms are kept sorted; construction merges atoms whose locations agree
// after rounding to 12 decimal digits, which keeps floating noise from
// inflating the support.
class LossProbMeasure {
  public:
    struct Atom {
        double p;
        double w;
    };

    explicit LossProbMeasure(std::vector<Atom> atoms);
    static LossProbMeasure dirac(double p);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& locations() const { return locations_; }

    double integrate(const std::function<double(double)>& f) const;
    double mean() const;                          // ∫ p m(dp)
    double mass_at(double p) const;               // weight of the atom exactly at p
    double mass_of_interval(double a, double b) const;  // m[a, b]
    double mass_zero() const { return mass_at(0.0); }
    double mass_one() const { return mass_at(1.0); }

  private:
    std::vector<Atom> atoms_;
    std::vector<double> locations_;  // contiguous copy of atom positions for kernels
};

// Empirical measure (1/N) sum of point masses at each name's default-by-T
// probability.
LossProbMeasure build_loss_measure(const PoolSpec& pool, double horizon);

// Finite-N forms of the standing assumptions.
struct AssumptionReport {
    double mean_default_prob = 0.0;
    bool ig_ok = false;
    double zero_mass_fraction = 0.0;
    bool nondegen_ok = false;
    double notflat_fraction = 0.0;
    bool notflat_ok = false;
    double notflat_delta = 0.0;
    double notflat_epsilon = 0.0;
    double chebyshev_bound = 0.0;  // per-atom bound; 0 when the mean is not below alpha
};

// Returns (mean, mean < alpha).
std::pair<double, bool> check_investment_grade(const LossProbMeasure& m, double alpha);

// m{0} < 1 - alpha.
bool check_nondegeneracy(const LossProbMeasure& m, double alpha);

// Fraction of names with mu[T-delta, T) < epsilon, and whether it is < alpha.
std::pair<double, bool> check_not_flat(const PoolSpec& pool, double horizon, double alpha,
                                       double delta, double epsilon);

struct ChebyshevBound {
    double atomwise;  // sum of p(1-p) variances over (alpha - mean)^2
    double crude;     // 1 / (4 N (alpha - mean)^2)
};
ChebyshevBound chebyshev_tail_bound(const LossProbMeasure& m, long N, double alpha);

// Default not-flat window parameters when the caller has no preference.
inline double default_notflat_delta(double horizon) { return horizon / 20.0; }
constexpr double kDefaultNotFlatEpsilon = 1e-8;

AssumptionReport assumption_report(const PoolSpec& pool, const TrancheSpec& tranche,
                                   double notflat_delta, double notflat_epsilon);

}  // namespace cdold

#endif
