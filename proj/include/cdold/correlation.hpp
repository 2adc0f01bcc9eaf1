#ifndef CDOLD_CORRELATION_HPP
#define CDOLD_CORRELATION_HPP

#include <string>
#include <vector>

#include "cdold/asymptotics.hpp"

namespace cdold {

// Finite-state systemic factor: names are independent conditional on the
// state, and each state carries its own measure of default-by-T
// probabilities.
struct SystemicState {
    std::string label;
    double prob = 0.0;
    LossProbMeasure measure;
};

struct SystemicMixture {
    std::vector<SystemicState> states;

    void validate() const;  // positive probabilities summing to 1
};

struct MixtureRow {
    std::string label;
    double prob = 0.0;
    double lambda = 0.0;
    double rate = 0.0;
    double sigma_sq = 0.0;
    double protection_leg = 0.0;  // per-state leg, before the p(x) weight
    bool ig_ok = true;
    double mean = 0.0;
};

struct MixtureResult {
    double protection_leg = 0.0;  // sum of per-state legs weighted by p(x)
    double spread = 0.0;
    double premium_leg = 0.0;
    std::vector<MixtureRow> rows;  // sorted by label (the reduction order)
};

// Per-state protection legs combined with the state probabilities.  Every
// state must satisfy the per-state investment-grade condition; with
// enforce_ig=false the failures are reported in the rows and the offending
// states still abort only when their multiplier is unusable.
MixtureResult mixture_protection_leg(const SystemicMixture& mix, const TrancheSpec& tranche,
                                     long N, bool enforce_ig = true);

// The state with the smallest rate, and its single-term protection-leg
// approximation (per-state leg times the state probability).  A tie within
// 1e-12 is an error: the reduction assumes a unique dominant state.
struct DominantState {
    std::string label;
    double value = 0.0;
};
DominantState dominant_state(const SystemicMixture& mix, const TrancheSpec& tranche, long N);

// Discretized standard normal factor: nodes i/M for i in [-M^2, M^2] with
// CDF-increment probabilities; the end bins absorb the tails so the weights
// sum to one.
struct CopulaGrid {
    int M = 1;
    double rho = 0.0;
    std::vector<double> nodes;
    std::vector<double> probs;
};
CopulaGrid gaussian_copula_grid(int M, double rho);

// P(default | factor = x) = N((N^{-1}(p) - rho x) / sqrt(1 - rho^2)),
// with 0 and 1 as fixed points.
double conditional_default_prob(double p, double rho, double x);

// One systemic state per grid node, each with the conditional version of the
// base measure.
SystemicMixture copula_mixture(const CopulaGrid& grid, const LossProbMeasure& base);

}  // namespace cdold

#endif
