#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "cdold/entropy.hpp"
#include "cdold/support.hpp"

using namespace cdold;
using Catch::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Fixtures used across the rate tests; expected values computed with a
// 40-digit solver for the tilted-mean equation.
const LossProbMeasure kTwoAtom({{0.02, 1.0 / 3.0}, {0.05, 2.0 / 3.0}});
const LossProbMeasure kThreeAtom({{0.01, 0.25}, {0.05, 0.5}, {0.2, 0.25}});
}  // namespace

TEST_CASE("bernoulli entropy: branches and reference values") {
    for (double p : {0.01, 0.3, 0.5, 0.99}) REQUIRE(bernoulli_entropy(p, p) == Approx(0.0).margin(1e-15));
    REQUIRE(bernoulli_entropy(1.0, 0.5) == Approx(std::log(2.0)).margin(1e-15));
    REQUIRE(bernoulli_entropy(0.1, 0.02) == Approx(0.084301763737133870).margin(1e-14));
    REQUIRE(bernoulli_entropy(0.0, 0.3) == Approx(std::log(1.0 / 0.7)).margin(1e-15));
    REQUIRE(bernoulli_entropy(1.0, 0.3) == Approx(std::log(1.0 / 0.3)).margin(1e-15));
    REQUIRE(bernoulli_entropy(0.0, 0.0) == 0.0);
    REQUIRE(bernoulli_entropy(1.0, 1.0) == 0.0);

    SECTION("infinite when absolute continuity fails") {
        REQUIRE(bernoulli_entropy(0.5, 0.0) == kInf);
        REQUIRE(bernoulli_entropy(0.5, 1.0) == kInf);
        REQUIRE(bernoulli_entropy(1.0, 0.0) == kInf);
        REQUIRE(bernoulli_entropy(0.0, 1.0) == kInf);
    }

    SECTION("convex in the first argument") {
        double b2 = 0.1;
        for (double x : {0.05, 0.2, 0.6}) {
            double mid = bernoulli_entropy(x + 0.05, b2);
            REQUIRE(2 * mid <= bernoulli_entropy(x, b2) + bernoulli_entropy(x + 0.1, b2) + 1e-12);
        }
    }

    SECTION("rejects out-of-range arguments") {
        REQUIRE_THROWS_AS(bernoulli_entropy(-0.1, 0.5), NumericError);
        REQUIRE_THROWS_AS(bernoulli_entropy(0.5, 1.1), NumericError);
    }
}

TEST_CASE("tilted probability: identities and limits") {
    for (double p : {0.0, 0.02, 0.5, 0.97, 1.0}) REQUIRE(tilted_prob(p, 0.0) == Approx(p).margin(1e-16));
    for (double lam : {-5.0, 0.0, 3.0, 100.0}) {
        REQUIRE(tilted_prob(0.0, lam) == 0.0);
        REQUIRE(tilted_prob(1.0, lam) == 1.0);
    }
    REQUIRE(tilted_prob(0.02, 0.5848) == Approx(0.035331135434066397).margin(1e-14));
    REQUIRE(tilted_prob(0.3, kInf) == 1.0);
    REQUIRE(tilted_prob(0.3, -kInf) == 0.0);
    REQUIRE(tilted_prob(1.0, -kInf) == 1.0);
    REQUIRE(tilted_prob(0.0, kInf) == 0.0);

    SECTION("strictly increasing in lambda for interior p") {
        for (double p : {0.01, 0.4, 0.9}) {
            double prev = tilted_prob(p, -20.0);
            for (double lam = -15.0; lam <= 20.0; lam += 2.5) {
                double cur = tilted_prob(p, lam);
                REQUIRE(cur > prev);
                prev = cur;
            }
        }
    }

    SECTION("no overflow at extreme finite multipliers") {
        REQUIRE(tilted_prob(1e-12, 800.0) == Approx(1.0).margin(1e-6));
        REQUIRE(tilted_prob(1.0 - 1e-12, -800.0) == Approx(0.0).margin(1e-6));
    }
}

TEST_CASE("tilted mean: monotone dual map") {
    const LossProbMeasure& m = kTwoAtom;
    REQUIRE(tilted_mean(m, 0.0) == Approx(m.mean()).margin(1e-15));
    REQUIRE(tilted_mean(m, -kInf) == m.mass_one());
    REQUIRE(tilted_mean(m, kInf) == 1.0 - m.mass_zero());
    double prev = tilted_mean(m, -40.0);
    for (double lam = -35.0; lam <= 40.0; lam += 5.0) {
        double cur = tilted_mean(m, lam);
        REQUIRE(cur > prev);  // strict: all mass interior
        prev = cur;
    }
}

TEST_CASE("solve_rate: boundary classification") {
    SECTION("dirac at alpha gives zero multiplier and zero rate") {
        RateSolution s = solve_rate(LossProbMeasure::dirac(0.07), 0.07);
        REQUIRE(s.boundary == RateBoundary::interior);
        REQUIRE(s.lambda == Approx(0.0).margin(1e-12));
        REQUIRE(s.rate == Approx(0.0).margin(1e-12));
    }

    SECTION("single atom closed form") {
        RateSolution s = solve_rate(LossProbMeasure::dirac(0.02), 0.1);
        REQUIRE(s.lambda == Approx(1.6945957207744072).margin(1e-10));
        REQUIRE(s.rate == Approx(0.084301763737133870).margin(1e-12));
        REQUIRE(s.sigma_sq == Approx(0.09).margin(1e-10));  // tilt forced to alpha
    }

    SECTION("alpha at the one-mass edge: multiplier -inf") {
        LossProbMeasure m({{1.0, 0.2}, {0.5, 0.8}});
        RateSolution s = solve_rate(m, 0.2);
        REQUIRE(s.boundary == RateBoundary::lambda_minus_inf);
        REQUIRE(s.lambda == -kInf);
        // Entropy of pushing the interior atom to zero.
        REQUIRE(s.rate == Approx(0.8 * std::log(2.0)).margin(1e-12));
    }

    SECTION("alpha at the upper edge: multiplier +inf") {
        LossProbMeasure m({{0.0, 0.3}, {0.5, 0.7}});
        RateSolution s = solve_rate(m, 0.7);
        REQUIRE(s.boundary == RateBoundary::lambda_plus_inf);
        REQUIRE(s.lambda == kInf);
        REQUIRE(s.rate == Approx(0.7 * std::log(2.0)).margin(1e-12));
    }

    SECTION("two-point degenerate measure") {
        LossProbMeasure m({{0.0, 0.9}, {1.0, 0.1}});
        RateSolution s = solve_rate(m, 0.1);
        REQUIRE(s.boundary == RateBoundary::degenerate_mu_dagger);
        REQUIRE(s.rate == 0.0);
    }

    SECTION("infeasible alpha") {
        LossProbMeasure m({{0.0, 0.9}, {1.0, 0.1}});
        RateSolution s = solve_rate(m, 0.5);
        REQUIRE(s.boundary == RateBoundary::infeasible);
        REQUIRE(s.rate == kInf);
        REQUIRE_THROWS_AS(sigma_sq(m, 0.5), AssumptionError);
    }
}

TEST_CASE("solve_rate: two-atom fixture against the high-precision solution") {
    RateSolution s = solve_rate(kTwoAtom, 0.1);
    REQUIRE(s.boundary == RateBoundary::interior);
    REQUIRE(s.lambda == Approx(0.989235148212543624).margin(1e-10));
    REQUIRE(s.rate == Approx(0.0337943114062216858).margin(1e-12));
    REQUIRE(s.sigma_sq == Approx(0.0888492437159054854).margin(1e-12));

    SECTION("tilted-mean identity at the solved multiplier") {
        REQUIRE(tilted_mean(kTwoAtom, s.lambda) == Approx(0.1).margin(1e-10));
    }

    SECTION("stationarity: entropy slope equals the multiplier at every atom") {
        for (const auto& a : kTwoAtom.atoms()) {
            double phi = tilted_prob(a.p, s.lambda);
            REQUIRE(bernoulli_entropy_db1(phi, a.p) == Approx(s.lambda).margin(1e-8));
        }
    }
}

TEST_CASE("solve_rate: three-atom fixture") {
    RateSolution s = solve_rate(kThreeAtom, 0.15);
    REQUIRE(s.lambda == Approx(0.824501819744761426).margin(1e-10));
    REQUIRE(s.rate == Approx(0.0324459167921207609).margin(1e-12));
    REQUIRE(s.sigma_sq == Approx(0.111163723298358846).margin(1e-12));
}

TEST_CASE("sigma_sq: endpoint atoms contribute nothing") {
    // Only the interior atom matters; at alpha = 0.4 the multiplier is 0.
    LossProbMeasure m({{0.0, 0.5}, {1.0, 0.3}, {0.5, 0.2}});
    RateSolution s = solve_rate(m, 0.4);
    REQUIRE(s.lambda == Approx(0.0).margin(1e-10));
    REQUIRE(s.sigma_sq == Approx(0.2 * 0.25).margin(1e-12));
}

TEST_CASE("rate is nondecreasing in alpha") {
    double prev = -1.0;
    for (double alpha = 0.05; alpha <= 0.9; alpha += 0.05) {
        double r = rate_value(kTwoAtom, alpha);
        if (alpha >= kTwoAtom.mean()) {
            REQUIRE(r >= prev - 1e-12);
            prev = r;
        }
    }
}

TEST_CASE("brute-force oracle equivalence") {
    SECTION("single atom reduces to a pinned entropy") {
        REQUIRE(brute_force_rate(LossProbMeasure::dirac(0.02), 0.1, 1e-4) ==
                Approx(bernoulli_entropy(0.1, 0.02)).margin(1e-15));
    }

    SECTION("two atoms, 1e-4 grid") {
        double oracle = brute_force_rate(kTwoAtom, 0.1, 1e-4);
        REQUIRE(rate_value(kTwoAtom, 0.1) == Approx(oracle).margin(1e-6));
    }

    SECTION("three atoms, 1e-3 grid") {
        double oracle = brute_force_rate(kThreeAtom, 0.15, 1e-3);
        REQUIRE(rate_value(kThreeAtom, 0.15) == Approx(oracle).margin(1e-5));
    }

    SECTION("infeasible constraint gives +inf") {
        REQUIRE(brute_force_rate(LossProbMeasure({{0.0, 0.6}, {1.0, 0.4}}), 0.9, 1e-3) == kInf);
    }
}

TEST_CASE("homogeneous reduction") {
    // A single reference default probability: rate = entropy of alpha
    // against it, multiplier in closed form.
    double q = 0.03, alpha = 0.12;
    RateSolution s = solve_rate(LossProbMeasure::dirac(q), alpha);
    REQUIRE(s.rate == Approx(bernoulli_entropy(alpha, q)).margin(1e-12));
    REQUIRE(s.lambda ==
            Approx(std::log(alpha * (1 - q) / ((1 - alpha) * q))).margin(1e-10));
}

TEST_CASE("solver vs oracle on random measures") {
    // Random two- and three-atom measures with a feasible attachment point.
    // The grid oracle can only overshoot the infimum, and by no more than
    // the curvature of the entropy at the minimizer times the squared grid
    // resolution.
    std::mt19937_64 gen(20260810);
    std::uniform_real_distribution<double> up(0.02, 0.6);
    std::uniform_real_distribution<double> uw(0.1, 1.0);
    std::uniform_real_distribution<double> ua(0.05, 0.95);
    const double step = 1e-3;

    for (int trial = 0; trial < 50; ++trial) {
        int k = 2 + (trial % 2);
        std::vector<LossProbMeasure::Atom> atoms(k);
        double wsum = 0.0;
        for (auto& a : atoms) {
            a.p = up(gen);
            a.w = uw(gen);
            wsum += a.w;
        }
        for (auto& a : atoms) a.w /= wsum;
        LossProbMeasure m{std::vector<LossProbMeasure::Atom>(atoms)};
        if (m.atoms().size() != static_cast<std::size_t>(k)) continue;  // merged duplicates
        double alpha = m.mean() + ua(gen) * (1.0 - 1e-6 - m.mean());
        if (!(alpha > 0.0 && alpha < 1.0)) continue;

        RateSolution sol = solve_rate(m, alpha);
        REQUIRE(sol.boundary == RateBoundary::interior);
        REQUIRE(tilted_mean(m, sol.lambda) == Approx(alpha).margin(1e-10));

        double oracle = brute_force_rate(m, alpha, step);
        REQUIRE(sol.rate <= oracle + 1e-9);
        double d = 0.5 * step, dep = 0.0, bound = 0.0;
        const auto& pa = m.atoms();
        for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
            double phi = tilted_prob(pa[i].p, sol.lambda);
            bound += 0.5 * pa[i].w * (1.0 / phi + 1.0 / (1.0 - phi)) * d * d;
            dep += pa[i].w * d;
        }
        double phi_last = tilted_prob(pa.back().p, sol.lambda);
        double d_last = dep / pa.back().w;
        bound += 0.5 * pa.back().w * (1.0 / phi_last + 1.0 / (1.0 - phi_last)) * d_last * d_last;
        REQUIRE(oracle - sol.rate <= 2.0 * bound + 1e-9);
    }
}
