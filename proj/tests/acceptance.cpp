// Acceptance suite: one criterion per invocation (argv[1] = 1..11), or all
// when run without arguments.  Each criterion prints a single PASS/FAIL line
// with the measured quantities; the process exits nonzero if any requested
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "cdold/asymptotics.hpp"
#include "cdold/correlation.hpp"
#include "cdold/merton.hpp"
#include "cdold/monte_carlo.hpp"
#include "cdold/support.hpp"

using namespace cdold;

namespace {

const GammaVolSpec kVolSpec{0.3, 2.0};
constexpr double kTheta = 6.0;
constexpr double kBarrier = 0.857;
constexpr double kHorizon = 5.0;

TrancheSpec sec6_tranche(double alpha = 0.1, double beta = 0.15) {
    TrancheSpec t;
    t.alpha = alpha;
    t.beta = beta;
    t.rate = 0.05;
    t.horizon = kHorizon;
    t.premium_dates = {1.0, 2.0, 3.0, 4.0, 5.0};
    return t;
}

DefaultDistribution linear_name(double p, double horizon) {
    return DefaultDistribution::tabulated({0.0, horizon}, {0.0, p}, 1.0 - p);
}

PoolSpec homogeneous_pool(int n, double p) {
    PoolSpec pool;
    for (int i = 0; i < n; ++i) pool.names.push_back(linear_name(p, kHorizon));
    return pool;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// --------------------------------------------------------------------------
// 1. Mean of the limiting measure
// --------------------------------------------------------------------------
Outcome criterion_1() {
    LossProbMeasure m = limiting_measure(kVolSpec, kTheta, kBarrier, kHorizon, 64);
    double mean = m.mean();
    bool pass = std::abs(mean - 0.0738) <= 5e-4;
    return {pass, "mean = " + fmt_g17(mean) + ", target 0.0738 +- 5e-4"};
}

// --------------------------------------------------------------------------
// 2. Multiplier at alpha = 0.1
// --------------------------------------------------------------------------
Outcome criterion_2() {
    LossProbMeasure m = limiting_measure(kVolSpec, kTheta, kBarrier, kHorizon, 64);
    double lam = solve_lambda(m, 0.1);
    bool pass = std::abs(lam - 0.5848) <= 2e-3;
    return {pass, "lambda = " + fmt_g17(lam) + ", target 0.5848 +- 2e-3"};
}

// --------------------------------------------------------------------------
// 3. Rate solver vs grid-search oracle on ten fixed measures
// --------------------------------------------------------------------------
Outcome criterion_3() {
    struct Fixture {
        LossProbMeasure m;
        double alpha;
    };
    std::vector<Fixture> two = {
        {LossProbMeasure({{0.02, 1.0 / 3}, {0.05, 2.0 / 3}}), 0.10},
        {LossProbMeasure({{0.01, 0.5}, {0.08, 0.5}}), 0.12},
        {LossProbMeasure({{0.03, 0.25}, {0.06, 0.75}}), 0.09},
        {LossProbMeasure({{0.10, 0.6}, {0.30, 0.4}}), 0.25},
        {LossProbMeasure({{0.005, 0.8}, {0.05, 0.2}}), 0.05},
        {LossProbMeasure({{0.04, 0.9}, {0.20, 0.1}}), 0.15},
    };
    std::vector<Fixture> three = {
        {LossProbMeasure({{0.01, 0.25}, {0.05, 0.5}, {0.2, 0.25}}), 0.15},
        {LossProbMeasure({{0.02, 1.0 / 3}, {0.05, 1.0 / 3}, {0.10, 1.0 / 3}}), 0.12},
        {LossProbMeasure({{0.03, 0.5}, {0.08, 0.3}, {0.15, 0.2}}), 0.10},
        {LossProbMeasure({{0.05, 0.2}, {0.10, 0.5}, {0.25, 0.3}}), 0.20},
    };
    double worst1 = 0.0, worst2 = 0.0;
    for (const auto& f : two)
        worst1 = std::max(worst1,
                          std::abs(rate_value(f.m, f.alpha) - brute_force_rate(f.m, f.alpha, 1e-4)));
    for (const auto& f : three)
        worst2 = std::max(worst2,
                          std::abs(rate_value(f.m, f.alpha) - brute_force_rate(f.m, f.alpha, 1e-3)));
    bool pass = worst1 <= 1e-6 && worst2 <= 1e-5;
    return {pass, "max |solver - oracle|: 1-D " + fmt_g17(worst1) + " (<= 1e-6), 2-D " +
                      fmt_g17(worst2) + " (<= 1e-5)"};
}

// --------------------------------------------------------------------------
// 4. Tilt identity on all fixtures
// --------------------------------------------------------------------------
Outcome criterion_4() {
    std::vector<std::pair<PoolSpec, TrancheSpec>> fixtures;
    fixtures.emplace_back(homogeneous_pool(40, 0.15), sec6_tranche(0.2, 0.4));
    fixtures.emplace_back(build_gamma_merton_pool(kVolSpec, kTheta, kBarrier, 100, kHorizon),
                          sec6_tranche());
    fixtures.emplace_back(build_gamma_merton_pool(kVolSpec, kTheta, kBarrier, 300, kHorizon),
                          sec6_tranche());
    {
        PoolSpec mixed;
        for (int n = 1; n <= 60; ++n)
            mixed.names.push_back(linear_name(n % 3 == 0 ? 0.02 : 0.05, kHorizon));
        fixtures.emplace_back(std::move(mixed), sec6_tranche(0.1, 0.2));
    }
    {
        PoolSpec ladder;
        for (int n = 0; n < 128; ++n) ladder.names.push_back(linear_name(0.001 + 0.0006 * n, kHorizon));
        fixtures.emplace_back(std::move(ladder), sec6_tranche(0.08, 0.12));
    }
    double worst = 0.0;
    for (const auto& [pool, tranche] : fixtures) {
        TiltedPool tp = tilt_pool(pool, tranche);
        NeumaierSum s;
        for (double u : tp.tilted_probs) s.add(u);
        worst = std::max(worst, std::abs(s.value() / pool.size() - tranche.alpha));
    }
    return {worst <= 1e-12, "max |mean tilted prob - alpha| = " + fmt_g17(worst) + " (<= 1e-12)"};
}

// --------------------------------------------------------------------------
// 5. Local CLT at N = 400 and 1600
// --------------------------------------------------------------------------
Outcome criterion_5() {
    auto merton_tilted = [&](long n) {
        PoolSpec pool = build_gamma_merton_pool(kVolSpec, kTheta, kBarrier, static_cast<int>(n),
                                                kHorizon);
        return tilt_pool(pool, sec6_tranche()).tilted_probs;
    };
    double h400 = local_clt_max_error(std::vector<double>(400, 0.1), 0.1, 400);
    double h1600 = local_clt_max_error(std::vector<double>(1600, 0.1), 0.1, 1600);
    double m400 = local_clt_max_error(merton_tilted(400), 0.1, 400);
    double m1600 = local_clt_max_error(merton_tilted(1600), 0.1, 1600);
    bool pass = h400 <= 0.1 && m400 <= 0.1 && h1600 < h400 && m1600 < m400;
    return {pass, "max rel err at N=400: homogeneous " + fmt_g17(h400) + ", gamma-merton " +
                      fmt_g17(m400) + " (<= 0.1); at N=1600: " + fmt_g17(h1600) + ", " +
                      fmt_g17(m1600) + " (must decrease)"};
}

// --------------------------------------------------------------------------
// 6. Importance-sampled pre-exponential factor vs the closed form
// --------------------------------------------------------------------------
Outcome criterion_6() {
    PoolSpec pool = build_gamma_merton_pool(kVolSpec, kTheta, kBarrier, 300, kHorizon);
    TrancheSpec t = sec6_tranche();
    McEstimate est = estimate_protection_is(pool, t, 100000, 2026);

    LossProbMeasure m = build_loss_measure(pool, t.horizon);
    RateSolution sol = solve_rate(m, t.alpha);
    double g = granularity(300, t.alpha);
    double closed = std::exp(-t.rate * t.horizon) * i2_factor(sol.lambda, g) /
                    (std::pow(300.0, 1.5) * (t.beta - t.alpha) *
                     std::sqrt(2.0 * M_PI * sol.sigma_sq));
    double ratio = est.pre_exp_mean / closed;
    bool in_band = ratio >= 0.85 && ratio <= 1.15;
    bool brackets = std::abs(est.pre_exp_mean - closed) <= 3.0 * est.pre_exp_se;
    return {in_band && brackets,
            "MC I_N = " + fmt_g17(est.pre_exp_mean) + " +- " + fmt_g17(est.pre_exp_se) +
                ", closed form = " + fmt_g17(closed) + ", ratio = " + fmt_g17(ratio) +
                " (need [0.85, 1.15] and 3-SE bracket)"};
}

// --------------------------------------------------------------------------
// 7. Cross-estimator agreement and the enumeration oracle
// --------------------------------------------------------------------------
Outcome criterion_7() {
    TrancheSpec t = sec6_tranche(0.2, 0.4);
    PoolSpec pool = homogeneous_pool(40, 0.15);
    McEstimate plain = estimate_protection_plain(pool, t, 100000, 31);
    McEstimate is = estimate_protection_is(pool, t, 100000, 32);
    double se = std::hypot(plain.standard_error, is.standard_error);
    bool agree = std::abs(plain.mean - is.mean) <= 3.0 * se;

    // Enumeration oracle: N = 10 names, defaults on a 4-point grid.
    const int N = 10;
    const std::vector<double> grid = {1.25, 2.5, 3.75, 5.0 - 1e-6};
    PoolSpec small;
    std::vector<std::vector<double>> probs(N);
    const double eps = 1e-9;
    for (int n = 0; n < N; ++n) {
        double p = 0.08 + 0.01 * n;
        probs[n] = {0.4 * p, 0.3 * p, 0.2 * p, 0.1 * p};
        std::vector<double> times = {0.0};
        std::vector<double> cdf = {0.0};
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            times.push_back(grid[j] - eps);
            cdf.push_back(acc);
            acc += probs[n][j];
            times.push_back(grid[j]);
            cdf.push_back(acc);
        }
        small.names.push_back(DefaultDistribution::tabulated(times, cdf, 1.0 - acc));
    }
    TrancheSpec ts = sec6_tranche(2.5 / N, 6.5 / N);
    double exact = 0.0;
    long total = 1;
    for (int n = 0; n < N; ++n) total *= 5;
    for (long code = 0; code < total; ++code) {
        long c = code;
        double prob = 1.0;
        LossPath path;
        for (int n = 0; n < N; ++n) {
            int o = static_cast<int>(c % 5);
            c /= 5;
            if (o == 4) {
                prob *= 1.0 - probs[n][0] - probs[n][1] - probs[n][2] - probs[n][3];
            } else {
                prob *= probs[n][o];
                path.times.push_back(grid[o]);
            }
        }
        std::sort(path.times.begin(), path.times.end());
        exact += prob * protection_payoff(path, ts, N);
    }
    McEstimate ep = estimate_protection_plain(small, ts, 100000, 41);
    McEstimate ei = estimate_protection_is(small, ts, 100000, 42);
    bool enum_ok = std::abs(ep.mean - exact) <= 3.0 * ep.standard_error &&
                   std::abs(ei.mean - exact) <= 3.0 * ei.standard_error;
    return {agree && enum_ok,
            "plain " + fmt_g17(plain.mean) + " vs IS " + fmt_g17(is.mean) + " (3SE " +
                fmt_g17(3 * se) + "); enumeration " + fmt_g17(exact) + " vs plain " +
                fmt_g17(ep.mean) + " / IS " + fmt_g17(ei.mean)};
}

// --------------------------------------------------------------------------
// 8. Passage-probability quadrature vs closed form
// --------------------------------------------------------------------------
Outcome criterion_8() {
    double worst = 0.0;
    for (double sigma : {0.3, 0.6, 1.0, 1.5, 2.0})
        for (double T : {1.0, 2.0, 3.0, 4.0, 5.0}) {
            MertonParams mp;
            mp.theta = kTheta;
            mp.K = kBarrier;
            mp.sigma = sigma;
            worst = std::max(worst, std::abs(merton_default_prob(mp, T) -
                                             merton_default_prob_closed(mp, T)));
        }
    return {worst <= 1e-6, "max |quadrature - closed| over the 5x5 grid = " + fmt_g17(worst)};
}

// --------------------------------------------------------------------------
// 9. Conditional payoff means vs the linear reference
// --------------------------------------------------------------------------
Outcome criterion_9() {
    PoolSpec pool = build_gamma_merton_pool(kVolSpec, kTheta, kBarrier, 200, kHorizon);
    auto rows = hn_empirical(pool, sec6_tranche(), 100000, 77);
    bool pass = true;
    std::string detail = "ratios:";
    for (const auto& row : rows) {
        long s = std::lround(row.s);
        if (s < 1 || s > 3) continue;
        double ratio = row.empirical / row.reference;
        detail += " s=" + std::to_string(s) + ": " + fmt_g17(ratio) + " (n=" +
                  std::to_string(row.count) + ")";
        if (!row.enough || ratio < 0.8 || ratio > 1.2) pass = false;
    }
    return {pass, detail + " (need [0.8, 1.2])"};
}

// --------------------------------------------------------------------------
// 10. Monotonicity suite
// --------------------------------------------------------------------------
Outcome criterion_10() {
    LossProbMeasure two({{0.02, 1.0 / 3}, {0.05, 2.0 / 3}});
    bool rate_monotone = true;
    double prev = -1.0;
    for (double alpha = 0.05; alpha <= 0.95; alpha += 0.01) {
        double r = rate_value(two, alpha);
        if (r < prev - 1e-12) rate_monotone = false;
        prev = r;
    }

    bool curve_monotone = true;
    std::vector<double> grid;
    for (double lam = -30.0; lam <= 30.0; lam += 0.25) grid.push_back(lam);
    auto curve = lambda_curve(two, grid);
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].integral < curve[i - 1].integral) curve_monotone = false;

    bool ordered = true;
    auto builder = [&](long n) {
        return build_loss_measure(build_gamma_merton_pool(kVolSpec, kTheta, kBarrier,
                                                          static_cast<int>(n), kHorizon),
                                  kHorizon);
    };
    std::vector<long> n_list;
    for (long n = 150; n <= 400; n += 25) n_list.push_back(n);
    std::vector<std::vector<SstarRow>> curves;
    for (double alpha : {0.10, 0.12, 0.14})
        curves.push_back(sstar_curve(builder, std::nullopt, sec6_tranche(alpha), n_list));
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (!curves[0][i].error.empty() || !curves[1][i].error.empty() ||
            !curves[2][i].error.empty())
            ordered = false;
        else if (!(curves[1][i].sstar < curves[0][i].sstar &&
                   curves[2][i].sstar < curves[1][i].sstar))
            ordered = false;
    }
    bool pass = rate_monotone && curve_monotone && ordered;
    return {pass, std::string("rate nondecreasing: ") + (rate_monotone ? "yes" : "NO") +
                      ", lambda curve nondecreasing: " + (curve_monotone ? "yes" : "NO") +
                      ", spread curves ordered in alpha: " + (ordered ? "yes" : "NO")};
}

// --------------------------------------------------------------------------
// 11. Correlation assembly
// --------------------------------------------------------------------------
Outcome criterion_11() {
    TrancheSpec t = sec6_tranche();
    LossProbMeasure calm({{0.02, 0.5}, {0.04, 0.5}});
    LossProbMeasure stressed({{0.04, 0.5}, {0.07, 0.5}});
    SystemicMixture mix;
    mix.states.push_back({"calm", 0.65, calm});
    mix.states.push_back({"stressed", 0.35, stressed});
    MixtureResult res = mixture_protection_leg(mix, t, 300);
    double by_hand = 0.65 * protection_leg_asymptotic(calm, t, 300) +
                     0.35 * protection_leg_asymptotic(stressed, t, 300);
    bool assembly = std::abs(res.protection_leg - by_hand) <= 1e-12 * by_hand;

    CopulaGrid grid = gaussian_copula_grid(20, 0.35);
    double total = 0.0;
    for (double p : grid.probs) total += p;
    bool sums = total == 1.0;

    double worst_tower = 0.0;
    for (double p : {0.02, 0.1, 0.5}) {
        NeumaierSum s;
        for (std::size_t i = 0; i < grid.nodes.size(); ++i)
            s.add(grid.probs[i] * conditional_default_prob(p, grid.rho, grid.nodes[i]));
        worst_tower = std::max(worst_tower, std::abs(s.value() - p));
    }
    bool tower = worst_tower <= 2e-3;
    return {assembly && sums && tower,
            "assembly gap " + fmt_g17(std::abs(res.protection_leg - by_hand)) + ", grid sum " +
                fmt_g17(total) + ", tower error " + fmt_g17(worst_tower) + " (<= 2e-3)"};
}

struct Criterion {
    int id;
    double time_budget_s;
    std::function<Outcome()> run;
    const char* name;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, 5.0, criterion_1, "limiting-measure mean"},
        {2, 5.0, criterion_2, "multiplier at alpha=0.1"},
        {3, 60.0, criterion_3, "rate solver vs grid-search oracle"},
        {4, 0.0, criterion_4, "tilt identity"},
        {5, 60.0, criterion_5, "local CLT"},
        {6, 300.0, criterion_6, "IS pre-exponential validation"},
        {7, 120.0, criterion_7, "cross-estimator and enumeration oracle"},
        {8, 0.0, criterion_8, "passage-probability oracle grid"},
        {9, 0.0, criterion_9, "conditional payoff shape"},
        {10, 0.0, criterion_10, "monotonicity suite"},
        {11, 0.0, criterion_11, "correlation assembly"},
    };

    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = c.time_budget_s == 0.0 || elapsed <= c.time_budget_s;
        bool pass = out.pass && in_time;
        std::printf("criterion %2d [%s]: %s  (%.2f s%s)  %s\n", c.id,
                    c.name, pass ? "PASS" : "FAIL", elapsed,
                    in_time ? "" : ", over budget", out.detail.c_str());
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
