#include "cdold/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdold/simd.hpp"
#include "cdold/support.hpp"

namespace cdold {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBoundaryTol = 1e-12;  // alpha vs atom-mass comparisons
constexpr double kSolveTol = 1e-13;     // |tilted_mean - alpha| at the root
}  // namespace

double bernoulli_entropy(double b1, double b2) {
    if (!(b1 >= 0.0 && b1 <= 1.0 && b2 >= 0.0 && b2 <= 1.0))
        throw NumericError("bernoulli_entropy: arguments outside [0,1]");
    if (b1 == 1.0) return b2 > 0.0 ? std::log(1.0 / b2) : kInf;
    if (b1 == 0.0) return b2 < 1.0 ? -std::log1p(-b2) : kInf;
    if (b2 == 0.0 || b2 == 1.0) return kInf;
    // log1p keeps the (1-b1) term accurate for b1 near the endpoints.
    return b1 * (std::log(b1) - std::log(b2)) + (1.0 - b1) * (std::log1p(-b1) - std::log1p(-b2));
}

double bernoulli_entropy_db1(double b1, double b2) {
    return std::log(b1 / (1.0 - b1)) + std::log((1.0 - b2) / b2);
}

double tilted_prob(double p, double lambda) {
    if (!(p >= 0.0 && p <= 1.0)) throw NumericError("tilted_prob: p outside [0,1]");
    if (p == 0.0) return 0.0;  // fixed points of the tilt
    if (p == 1.0) return 1.0;
    if (lambda == kInf) return 1.0;
    if (lambda == -kInf) return 0.0;
    if (lambda >= 0.0) {
        // p / (p + (1-p) e^{-lambda}) cannot overflow for any lambda >= 0.
        return p / (p + (1.0 - p) * std::exp(-lambda));
    }
    double t = p * std::exp(lambda);
    return t / ((1.0 - p) + t);
}

double tilted_mean(const LossProbMeasure& m, double lambda) {
    if (lambda == kInf) return 1.0 - m.mass_zero();
    if (lambda == -kInf) return m.mass_one();
    // Batched kernel over the atom locations, then a compensated dot with
    // the weights.  exp clamped so e_lam stays finite and positive.
    const std::vector<double>& p = m.locations();
    std::vector<double> tilted(p.size());
    simd::tilt_batch(p.data(), tilted.data(), p.size(),
                     std::exp(std::clamp(lambda, -700.0, 700.0)));
    NeumaierSum s;
    const auto& atoms = m.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) s.add(atoms[i].w * tilted[i]);
    return s.value();
}

namespace {

double entropy_under_tilt(const LossProbMeasure& m, double lambda) {
    NeumaierSum s;
    for (const auto& a : m.atoms()) s.add(a.w * bernoulli_entropy(tilted_prob(a.p, lambda), a.p));
    return s.value();
}

double variance_under_tilt(const LossProbMeasure& m, double lambda) {
    NeumaierSum s;
    for (const auto& a : m.atoms()) {
        double t = tilted_prob(a.p, lambda);
        s.add(a.w * t * (1.0 - t));
    }
    return s.value();
}

bool is_mu_dagger(const LossProbMeasure& m, double alpha) {
    if (m.atoms().size() > 2) return false;
    return std::abs(m.mass_one() - alpha) <= kBoundaryTol &&
           std::abs(m.mass_zero() - (1.0 - alpha)) <= kBoundaryTol;
}

// Root of lambda -> tilted_mean(m, lambda) - alpha.  The map is strictly
// increasing when m(0,1) > 0 (guaranteed by the interior classification), but
// saturates at both ends, so the bracket is refined by bisection with a
// secant step accepted only when it stays inside.
double solve_multiplier(const LossProbMeasure& m, double alpha) {
    double lo = -50.0, hi = 50.0;
    double flo = tilted_mean(m, lo) - alpha;
    double fhi = tilted_mean(m, hi) - alpha;
    while (flo > 0.0 && lo > -700.0) {
        lo *= 2.0;
        flo = tilted_mean(m, lo) - alpha;
    }
    while (fhi < 0.0 && hi < 700.0) {
        hi *= 2.0;
        fhi = tilted_mean(m, hi) - alpha;
    }
    if (flo > 0.0 || fhi < 0.0)
        throw NumericError("solve_rate: could not bracket the dual multiplier");

    double lambda = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        // Secant proposal from the bracket endpoints.
        if (fhi != flo) {
            double sec = lo - flo * (hi - lo) / (fhi - flo);
            if (sec > lo && sec < hi) mid = sec;
        }
        double fm = tilted_mean(m, mid) - alpha;
        lambda = mid;
        if (std::abs(fm) <= kSolveTol) return lambda;
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid)))
            break;
    }
    // The bracket collapsed to machine width; accept the best point if the
    // residual meets the documented tolerance.
    if (std::abs(tilted_mean(m, lambda) - alpha) <= 1e-12) return lambda;
    throw NumericError("solve_rate: dual multiplier iteration did not converge");
}

}  // namespace

RateSolution solve_rate(const LossProbMeasure& m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw NumericError("solve_rate: alpha outside (0,1)");
    RateSolution out;

    const double m1 = m.mass_one();
    const double m0 = m.mass_zero();

    if (is_mu_dagger(m, alpha)) {
        out.boundary = RateBoundary::degenerate_mu_dagger;
        out.lambda = kNaN;  // every multiplier satisfies the constraint
        out.rate = 0.0;
        out.sigma_sq = 0.0;
        return out;
    }
    if (m1 - alpha > kBoundaryTol || alpha - (1.0 - m0) > kBoundaryTol) {
        out.boundary = RateBoundary::infeasible;
        out.lambda = kNaN;
        out.rate = kInf;
        out.sigma_sq = kNaN;
        return out;
    }
    if (std::abs(alpha - m1) <= kBoundaryTol) {
        out.boundary = RateBoundary::lambda_minus_inf;
        out.lambda = -kInf;
    } else if (std::abs(alpha - (1.0 - m0)) <= kBoundaryTol) {
        out.boundary = RateBoundary::lambda_plus_inf;
        out.lambda = kInf;
    } else {
        out.boundary = RateBoundary::interior;
        out.lambda = solve_multiplier(m, alpha);
    }
    out.rate = entropy_under_tilt(m, out.lambda);
    out.sigma_sq = variance_under_tilt(m, out.lambda);
    return out;
}

double solve_lambda(const LossProbMeasure& m, double alpha) { return solve_rate(m, alpha).lambda; }

double rate_value(const LossProbMeasure& m, double alpha) { return solve_rate(m, alpha).rate; }

double sigma_sq(const LossProbMeasure& m, double alpha) {
    RateSolution s = solve_rate(m, alpha);
    if (s.boundary == RateBoundary::infeasible)
        throw AssumptionError("sigma_sq: alpha is infeasible for this measure");
    return s.sigma_sq;
}

// ----------------------------------------------------------------------------
// Grid-search oracle
// ----------------------------------------------------------------------------

namespace {

// phi values 0..1 inclusive with the given step; both endpoints present.
std::vector<double> phi_grid(double step) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(1.0 / step) + 2);
    for (double v = 0.0; v < 1.0; v += step) g.push_back(v);
    g.push_back(1.0);
    return g;
}

}  // namespace

double brute_force_rate(const LossProbMeasure& m, double alpha, double grid_step) {
    const auto& atoms = m.atoms();
    const std::size_t k = atoms.size();
    if (k > 3) throw NumericError("brute_force_rate: supports at most three atoms");
    if (!(grid_step > 0.0 && grid_step < 1.0))
        throw NumericError("brute_force_rate: bad grid step");

    double best = kInf;
    if (k == 1) {
        // Constraint pins the single coordinate.
        double phi = alpha / atoms[0].w;
        if (phi >= 0.0 && phi <= 1.0) best = atoms[0].w * bernoulli_entropy(phi, atoms[0].p);
        return best;
    }

    const std::vector<double> grid = phi_grid(grid_step);
    if (k == 2) {
        for (double phi0 : grid) {
            double phi1 = (alpha - atoms[0].w * phi0) / atoms[1].w;
            if (phi1 < 0.0 || phi1 > 1.0) continue;
            double v = atoms[0].w * bernoulli_entropy(phi0, atoms[0].p) +
                       atoms[1].w * bernoulli_entropy(phi1, atoms[1].p);
            if (v < best) best = v;
        }
        return best;
    }

    for (double phi0 : grid) {
        double e0 = atoms[0].w * bernoulli_entropy(phi0, atoms[0].p);
        if (e0 >= best) continue;
        for (double phi1 : grid) {
            double phi2 = (alpha - atoms[0].w * phi0 - atoms[1].w * phi1) / atoms[2].w;
            if (phi2 < 0.0 || phi2 > 1.0) continue;
            double v = e0 + atoms[1].w * bernoulli_entropy(phi1, atoms[1].p) +
                       atoms[2].w * bernoulli_entropy(phi2, atoms[2].p);
            if (v < best) best = v;
        }
    }
    return best;
}

}  // namespace cdold
