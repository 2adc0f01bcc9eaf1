#include "cdold/loss_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cdold/support.hpp"

namespace cdold {

namespace {

// Merge key: p rounded to 12 decimal digits.
double canonical_p(double p) { return std::round(p * 1e12) / 1e12; }

}  // namespace

LossProbMeasure::LossProbMeasure(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ConfigError("LossProbMeasure: no atoms");
    std::map<double, double> merged;
    for (const Atom& a : atoms) {
        if (!(a.w > 0.0)) throw ConfigError("LossProbMeasure: weights must be positive");
        double p = canonical_p(a.p);
        if (p < 0.0 || p > 1.0) throw ConfigError("LossProbMeasure: atom outside [0,1]");
        merged[p] += a.w;
    }
    NeumaierSum total;
    for (auto& [p, w] : merged) total.add(w);
    if (std::abs(total.value() - 1.0) > 1e-12)
        throw ConfigError("LossProbMeasure: weights must sum to 1");
    atoms_.reserve(merged.size());
    locations_.reserve(merged.size());
    for (auto& [p, w] : merged) {
        atoms_.push_back({p, w});
        locations_.push_back(p);
    }
}

LossProbMeasure LossProbMeasure::dirac(double p) { return LossProbMeasure({{p, 1.0}}); }

double LossProbMeasure::integrate(const std::function<double(double)>& f) const {
    NeumaierSum s;
    for (const Atom& a : atoms_) s.add(a.w * f(a.p));
    return s.value();
}

double LossProbMeasure::mean() const {
    NeumaierSum s;
    for (const Atom& a : atoms_) s.add(a.w * a.p);
    return s.value();
}

double LossProbMeasure::mass_at(double p) const {
    double key = canonical_p(p);
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                               [](const Atom& a, double v) { return a.p < v; });
    if (it != atoms_.end() && it->p == key) return it->w;
    return 0.0;
}

double LossProbMeasure::mass_of_interval(double a, double b) const {
    NeumaierSum s;
    for (const Atom& atom : atoms_)
        if (atom.p >= a && atom.p <= b) s.add(atom.w);
    return s.value();
}

LossProbMeasure build_loss_measure(const PoolSpec& pool, double horizon) {
    pool.validate();
    const double w = 1.0 / pool.size();
    std::vector<LossProbMeasure::Atom> atoms;
    atoms.reserve(pool.names.size());
    for (const DefaultDistribution& d : pool.names) atoms.push_back({d.default_prob(horizon), w});
    return LossProbMeasure(std::move(atoms));
}

std::pair<double, bool> check_investment_grade(const LossProbMeasure& m, double alpha) {
    double mean = m.mean();
    return {mean, mean < alpha};
}

bool check_nondegeneracy(const LossProbMeasure& m, double alpha) {
    return m.mass_zero() < 1.0 - alpha;
}

std::pair<double, bool> check_not_flat(const PoolSpec& pool, double horizon, double alpha,
                                       double delta, double epsilon) {
    if (!(delta > 0.0 && delta < horizon)) throw ConfigError("check_not_flat: need 0 < delta < T");
    if (!(epsilon > 0.0)) throw ConfigError("check_not_flat: epsilon must be positive");
    long flat = 0;
    for (const DefaultDistribution& d : pool.names)
        if (d.window_prob(horizon - delta, horizon) < epsilon) ++flat;
    double fraction = static_cast<double>(flat) / pool.size();
    return {fraction, fraction < alpha};
}

ChebyshevBound chebyshev_tail_bound(const LossProbMeasure& m, long N, double alpha) {
    double mean = m.mean();
    if (!(mean < alpha))
        throw AssumptionError("chebyshev_tail_bound: mean default probability must be below alpha");
    double gap2 = (alpha - mean) * (alpha - mean);
    double var = m.integrate([](double p) { return p * (1.0 - p); });
    return {var / (N * gap2), 1.0 / (4.0 * N * gap2)};
}

AssumptionReport assumption_report(const PoolSpec& pool, const TrancheSpec& tranche,
                                   double notflat_delta, double notflat_epsilon) {
    LossProbMeasure m = build_loss_measure(pool, tranche.horizon);
    AssumptionReport r;
    auto [mean, ig] = check_investment_grade(m, tranche.alpha);
    r.mean_default_prob = mean;
    r.ig_ok = ig;
    r.zero_mass_fraction = m.mass_zero();
    r.nondegen_ok = check_nondegeneracy(m, tranche.alpha);
    auto [frac, nf] =
        check_not_flat(pool, tranche.horizon, tranche.alpha, notflat_delta, notflat_epsilon);
    r.notflat_fraction = frac;
    r.notflat_ok = nf;
    r.notflat_delta = notflat_delta;
    r.notflat_epsilon = notflat_epsilon;
    r.chebyshev_bound = ig ? chebyshev_tail_bound(m, pool.size(), tranche.alpha).atomwise : 0.0;
    return r;
}

}  // namespace cdold
