#ifndef CDOLD_ENTROPY_HPP
#define CDOLD_ENTROPY_HPP

#include "cdold/loss_measure.hpp"

namespace cdold {

// Relative entropy between Bernoulli(b1) and Bernoulli(b2), extended to the
// closed square: finite on the diagonal endpoints, +inf where Bernoulli(b1)
// is not absolutely continuous w.r.t. Bernoulli(b2).
double bernoulli_entropy(double b1, double b2);

// d bernoulli_entropy / d b1 on the open square:
// ln(b1 (1-b2) / ((1-b1) b2)).
double bernoulli_entropy_db1(double b1, double b2);

// Exponential tilt of a default probability:
//   p e^lambda / (1 - p + p e^lambda),
// with indicator limits at lambda = +/- infinity.  Strictly increasing in
// lambda whenever p is interior; fixes 0 and 1.
double tilted_prob(double p, double lambda);

// ∫ tilted_prob(p, lambda) m(dp); the dual map whose root gives the
// multiplier.
double tilted_mean(const LossProbMeasure& m, double lambda);

enum class RateBoundary {
    interior,             // finite multiplier solving the tilted-mean equation
    lambda_minus_inf,     // alpha equals m{1}
    lambda_plus_inf,      // alpha equals 1 - m{0}
    degenerate_mu_dagger, // m = (1-alpha) d_0 + alpha d_1: rate 0, multiplier undefined
    infeasible,           // alpha outside [m{1}, 1 - m{0}]: rate +inf
};

struct RateSolution {
    double lambda = 0.0;    // dual multiplier (NaN when undefined, +/-inf at the edges)
    double rate = 0.0;      // minimal averaged entropy
    double sigma_sq = 0.0;  // ∫ Phi (1-Phi) dm at the solved multiplier
    RateBoundary boundary = RateBoundary::interior;

    bool usable() const {
        return boundary == RateBoundary::interior || boundary == RateBoundary::lambda_minus_inf ||
               boundary == RateBoundary::lambda_plus_inf;
    }
};

// Full solve: classify the boundary case, then root-find the multiplier on
// the strictly monotone dual map (bisection with a safeguarded secant step,
// |tilted_mean - alpha| <= 1e-12 at the returned multiplier).
RateSolution solve_rate(const LossProbMeasure& m, double alpha);

double solve_lambda(const LossProbMeasure& m, double alpha);
double rate_value(const LossProbMeasure& m, double alpha);

// Tilted Bernoulli variance factor; rejects the infeasible case.
double sigma_sq(const LossProbMeasure& m, double alpha);

// Dense grid-search minimization of the averaged entropy over per-atom
// default probabilities constrained to average alpha.  Supports at most
// three atoms; the grid includes the endpoints 0 and 1.  This is the
// independent oracle for solve_rate / rate_value.
double brute_force_rate(const LossProbMeasure& m, double alpha, double grid_step);

}  // namespace cdold

#endif
