// Command-line front end: pricing, assumption validation, curve generation,
// and Monte Carlo validation for large-pool tranche asymptotics.
//
// Exit codes: 0 success, 2 assumption/feasibility failure, 3 numeric
// non-convergence, 4 configuration error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdold/asymptotics.hpp"
#include "cdold/config.hpp"
#include "cdold/correlation.hpp"
#include "cdold/merton.hpp"
#include "cdold/monte_carlo.hpp"
#include "cdold/support.hpp"

namespace {

using namespace cdold;

constexpr int kExitOk = 0;
constexpr int kExitAssumption = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitConfig = 4;

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    return file;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<long> parse_long_list(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
}

// Builds the systemic mixture and the pool size shared by its states.
std::pair<SystemicMixture, long> build_mixture(const RunSetup& setup) {
    const CorrelationConfig& cc = *setup.correlation;
    if (cc.kind == CorrelationConfig::Kind::finite_state) {
        SystemicMixture mix;
        long N = cc.states.front().pool.size();
        for (const auto& st : cc.states) {
            if (st.pool.size() != N)
                throw ConfigError("correlation: all states must share the pool size");
            mix.states.push_back(
                {st.label, st.prob, build_loss_measure(st.pool, setup.tranche.horizon)});
        }
        return {mix, N};
    }
    CopulaGrid grid = gaussian_copula_grid(cc.M, cc.rho);
    return {copula_mixture(grid, build_loss_measure(setup.pool, setup.tranche.horizon)),
            setup.pool.size()};
}

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

int cmd_price(const std::string& config_path, bool force, bool mixed_prefactor,
              const std::string& out_path) {
    RunSetup setup = load_config(config_path);
    std::ofstream file;
    std::ostream& os = open_output(out_path, file);

    LossProbMeasure m = build_loss_measure(setup.pool, setup.tranche.horizon);
    auto [mean, ig_ok] = check_investment_grade(m, setup.tranche.alpha);
    if (!ig_ok) {
        std::cerr << "warning: investment-grade assumption violated (mean " << fmt_g17(mean)
                  << " >= alpha " << fmt_g17(setup.tranche.alpha) << ")\n";
        if (!force) {
            std::cerr << "error: investment-grade assumption violated (use --force to price "
                         "anyway)\n";
            return kExitAssumption;
        }
    }

    long N = setup.pool.size();
    std::optional<LossProbMeasure> limit;
    if (mixed_prefactor) {
        if (!setup.gamma_spec)
            throw ConfigError("--mixed-prefactor requires a merton_gamma pool");
        const auto& mp = setup.pool.names.front().merton_params();
        limit = limiting_measure(*setup.gamma_spec, mp.theta, mp.K, setup.tranche.horizon, 64);
    }

    // The rate solution always runs (a forced non-investment-grade pool just
    // comes out with a non-positive multiplier); only the leg formula needs
    // the multiplier to be positive.
    RateSolution sol = solve_rate(m, setup.tranche.alpha);
    os << "N                  " << N << "\n";
    os << "granularity        " << fmt_g17(granularity(N, setup.tranche.alpha)) << "\n";
    os << "lambda             " << fmt_g17(sol.lambda) << "\n";
    os << "rate               " << fmt_g17(sol.rate) << "\n";
    os << "sigma_sq           " << fmt_g17(sol.sigma_sq) << "\n";
    AsymptoticResult res = limit ? spread_asymptotic(m, *limit, setup.tranche, N)
                                 : spread_asymptotic(m, setup.tranche, N);
    os << "protection_leg     " << fmt_g17(res.protection_leg) << "\n";
    os << "log_protection_leg " << fmt_g17(res.log_protection_leg) << "\n";
    os << "premium_leg        " << fmt_g17(res.premium_leg) << "\n";
    os << "spread             " << fmt_g17(res.spread) << "\n";
    os << "log_spread         " << fmt_g17(res.log_spread) << "\n";
    os << "prefactor_measure  "
       << (res.prefactor == PrefactorMeasure::limit ? "limit" : "finite_pool") << "\n";
    if (res.prefactor == PrefactorMeasure::limit) {
        os << "prefactor_lambda   " << fmt_g17(res.lambda) << "\n";
        os << "prefactor_sigma_sq " << fmt_g17(res.sigma_sq) << "\n";
    }

    if (setup.correlation) {
        auto [mix, mix_n] = build_mixture(setup);
        MixtureResult mr = mixture_protection_leg(mix, setup.tranche, mix_n, !force);
        os << "mixture_N          " << mix_n << "\n";
        os << "mixture_protection " << fmt_g17(mr.protection_leg) << "\n";
        os << "mixture_spread     " << fmt_g17(mr.spread) << "\n";
        DominantState dom = dominant_state(mix, setup.tranche, mix_n);
        os << "dominant_state     " << dom.label << "\n";
        os << "dominant_value     " << fmt_g17(dom.value) << "\n";
        os << "state breakdown (label prob lambda rate protection_leg):\n";
        for (const auto& row : mr.rows)
            os << "  " << row.label << " " << fmt_g17(row.prob) << " " << fmt_g17(row.lambda)
               << " " << fmt_g17(row.rate) << " " << fmt_g17(row.protection_leg) << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& config_path, double delta, double epsilon,
                 const std::string& out_path) {
    RunSetup setup = load_config(config_path);
    std::ofstream file;
    std::ostream& os = open_output(out_path, file);

    if (delta <= 0.0) delta = default_notflat_delta(setup.tranche.horizon);
    AssumptionReport rep = assumption_report(setup.pool, setup.tranche, delta, epsilon);

    bool all_ok = true;
    auto line = [&](const char* name, bool ok, const std::string& detail) {
        os << (ok ? "PASS" : "FAIL") << "  " << name << "  " << detail << "\n";
        all_ok = all_ok && ok;
    };
    line("investment-grade", rep.ig_ok,
         "mean=" + fmt_g17(rep.mean_default_prob) + " alpha=" + fmt_g17(setup.tranche.alpha));
    line("non-degeneracy", rep.nondegen_ok,
         "zero-mass=" + fmt_g17(rep.zero_mass_fraction) + " bound=" +
             fmt_g17(1.0 - setup.tranche.alpha));
    line("not-flat", rep.notflat_ok,
         "fraction=" + fmt_g17(rep.notflat_fraction) + " delta=" + fmt_g17(rep.notflat_delta) +
             " epsilon=" + fmt_g17(rep.notflat_epsilon));
    if (rep.ig_ok)
        os << "chebyshev tail bound " << fmt_g17(rep.chebyshev_bound) << "\n";

    // Rate-solver oracle: project the pool measure onto three quantile
    // clusters and compare against the grid-search minimizer.
    LossProbMeasure m = build_loss_measure(setup.pool, setup.tranche.horizon);
    {
        std::vector<LossProbMeasure::Atom> clusters;
        const auto& atoms = m.atoms();
        std::size_t k = std::min<std::size_t>(3, atoms.size());
        std::size_t start = 0;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t end = atoms.size() * (c + 1) / k;
            double w = 0.0, wp = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                w += atoms[i].w;
                wp += atoms[i].w * atoms[i].p;
            }
            if (w > 0.0) clusters.push_back({wp / w, w});
            start = end;
        }
        LossProbMeasure proj{std::move(clusters)};
        RateSolution sol = solve_rate(proj, setup.tranche.alpha);
        if (sol.boundary == RateBoundary::interior) {
            const double step = 1e-3;
            double oracle = brute_force_rate(proj, setup.tranche.alpha, step);
            // Grid resolution bound: second-order entropy curvature at the
            // minimizer, with the constraint folding the free-coordinate
            // offsets into the last one.
            const auto& pa = proj.atoms();
            double d = 0.5 * step, dep = 0.0, bound = 0.0;
            for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
                double phi = tilted_prob(pa[i].p, sol.lambda);
                bound += 0.5 * pa[i].w * (1.0 / phi + 1.0 / (1.0 - phi)) * d * d;
                dep += pa[i].w * d;
            }
            double phi_last = tilted_prob(pa.back().p, sol.lambda);
            double d_last = dep / pa.back().w;
            bound += 0.5 * pa.back().w * (1.0 / phi_last + 1.0 / (1.0 - phi_last)) * d_last * d_last;
            double tol = 2.0 * bound + 1e-9;
            // The grid minimum can only overshoot the true infimum, and by
            // no more than the curvature bound.
            bool ok = sol.rate <= oracle + 1e-9 && oracle - sol.rate <= tol;
            line("rate-oracle (3-atom projection)", ok,
                 "solver=" + fmt_g17(sol.rate) + " grid=" + fmt_g17(oracle) + " tol=" +
                     fmt_g17(tol));
        }
    }

    // Passage-probability oracle for Merton pools.
    bool any_merton = false;
    double worst = 0.0;
    for (const auto& name : setup.pool.names) {
        if (!name.is_merton()) continue;
        any_merton = true;
        const MertonParams& mp = name.merton_params();
        worst = std::max(worst, std::abs(merton_default_prob(mp, setup.tranche.horizon) -
                                         merton_default_prob_closed(mp, setup.tranche.horizon)));
        if (any_merton && worst > 1e-6) break;
    }
    if (any_merton)
        line("passage-probability oracle", worst <= 1e-6, "max |quadrature - closed| = " + fmt_g17(worst));

    return all_ok ? kExitOk : kExitAssumption;
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

int cmd_curves(const std::string& config_path, const std::string& which,
               const std::string& out_path, const std::string& alphas_text,
               const std::string& n_list_text, bool finite_prefactor) {
    RunSetup setup = load_config(config_path);

    if (which == "lambda") {
        std::ofstream file;
        std::ostream& os = open_output(out_path, file);
        LossProbMeasure m = build_loss_measure(setup.pool, setup.tranche.horizon);
        std::vector<double> grid;
        for (double lam = -5.0; lam <= 5.0 + 1e-12; lam += 0.01) grid.push_back(lam);
        os << "lambda,integral\n";
        for (const auto& pt : lambda_curve(m, grid))
            os << fmt_g17(pt.lambda) << "," << fmt_g17(pt.integral) << "\n";
        return kExitOk;
    }
    if (which != "sstar") throw ConfigError("curves: --which must be 'lambda' or 'sstar'");

    std::vector<double> alphas =
        alphas_text.empty() ? std::vector<double>{setup.tranche.alpha} : parse_double_list(alphas_text);
    std::vector<long> n_list;
    if (n_list_text.empty()) {
        for (long n = 150; n <= 1000; n += 10) n_list.push_back(n);
    } else {
        n_list = parse_long_list(n_list_text);
    }

    std::optional<LossProbMeasure> limit;
    if (!finite_prefactor && setup.gamma_spec) {
        const auto& mp = setup.pool.names.front().merton_params();
        limit = limiting_measure(*setup.gamma_spec, mp.theta, mp.K, setup.tranche.horizon, 64);
    }
    auto builder = [&](long n) { return build_loss_measure(setup.pool_builder(n), setup.tranche.horizon); };

    for (double alpha : alphas) {
        TrancheSpec tr = setup.tranche;
        tr.alpha = alpha;
        std::string path = out_path;
        if (alphas.size() > 1) {
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "_a%g", alpha);
            auto dot = path.rfind(".csv");
            path = dot == std::string::npos ? path + suffix : path.substr(0, dot) + suffix + ".csv";
        }
        std::ofstream file;
        std::ostream& os = open_output(path, file);
        os << "N,g,lambda,rate_i,sigma_sq,sstar\n";
        for (const auto& row : sstar_curve(builder, limit, tr, n_list)) {
            if (!row.error.empty()) {
                os << row.N << ",error," << row.error << ",,,\n";
                continue;
            }
            os << row.N << "," << fmt_g17(row.g) << "," << fmt_g17(row.lambda) << ","
               << fmt_g17(row.rate) << "," << fmt_g17(row.sigma_sq) << "," << fmt_g17(row.sstar)
               << "\n";
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

int cmd_mc(const std::string& config_path, long samples, std::uint64_t seed,
           const std::string& estimator, const std::string& report, const std::string& out_path) {
    RunSetup setup = load_config(config_path);
    std::ofstream file;
    std::ostream& os = open_output(out_path, file);
    const long N = setup.pool.size();

    if (report == "clt") {
        TiltedPool tp = tilt_pool(setup.pool, setup.tranche);
        double err = local_clt_max_error(tp.tilted_probs, setup.tranche.alpha, N);
        os << "local CLT max relative error (s <= N^{1/4}): " << fmt_g17(err) << "\n";
        return kExitOk;
    }
    if (report == "hn") {
        os << "s,count,empirical,reference,ratio\n";
        for (const auto& row : hn_empirical(setup.pool, setup.tranche, samples, seed)) {
            if (!row.enough) {
                os << fmt_g17(row.s) << "," << row.count << ",flagged: fewer than 30 samples,,\n";
                continue;
            }
            os << fmt_g17(row.s) << "," << row.count << "," << fmt_g17(row.empirical) << ","
               << fmt_g17(row.reference) << "," << fmt_g17(row.empirical / row.reference) << "\n";
        }
        return kExitOk;
    }
    if (report != "estimate") throw ConfigError("mc: --report must be estimate, hn, or clt");

    std::optional<McEstimate> plain, is;
    if (estimator == "plain" || estimator == "both")
        plain = estimate_protection_plain(setup.pool, setup.tranche, samples, seed);
    if (estimator == "is" || estimator == "both")
        is = estimate_protection_is(setup.pool, setup.tranche, samples, seed);
    if (!plain && !is) throw ConfigError("mc: --estimator must be plain, is, or both");

    os << "samples " << samples << "  seed " << seed << "\n";
    if (plain)
        os << "plain estimate " << fmt_g17(plain->mean) << " +- " << fmt_g17(plain->standard_error)
           << "\n";
    if (is) {
        os << "is estimate    " << fmt_g17(is->mean) << " +- " << fmt_g17(is->standard_error)
           << "\n";
        os << "is pre-exp     " << fmt_g17(is->pre_exp_mean) << " +- " << fmt_g17(is->pre_exp_se)
           << "  exponent " << fmt_g17(is->exponent) << "\n";
        os << "is log-mean    " << fmt_g17(is->log_mean) << "\n";
    }
    if (plain && is) {
        double se = std::hypot(plain->standard_error, is->standard_error);
        double diff = std::abs(plain->mean - is->mean);
        os << "cross-estimator |diff| = " << fmt_g17(diff) << " vs 3*SE = " << fmt_g17(3.0 * se)
           << (diff <= 3.0 * se ? "  (agree)" : "  (DISAGREE)") << "\n";
    }
    // MC / asymptotic ratio when the formula applies.
    try {
        LossProbMeasure m = build_loss_measure(setup.pool, setup.tranche.horizon);
        AsymptoticResult res = spread_asymptotic(m, setup.tranche, N);
        const McEstimate& best = is ? *is : *plain;
        if (best.mean > 0.0)
            os << "mc / asymptotic protection-leg ratio = " << fmt_g17(best.mean / res.protection_leg)
               << "\n";
    } catch (const AssumptionError&) {
        // Formula unavailable (e.g. non-investment-grade pool): fine for MC.
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pool-gen
// ---------------------------------------------------------------------------

int cmd_pool_gen(const std::string& config_path, const std::string& out_path) {
    RunSetup setup = load_config(config_path);
    std::ofstream file;
    std::ostream& os = open_output(out_path, file);
    os << explicit_pool_config(setup.pool, setup.tranche);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Large-pool tranche pricing asymptotics and Monte Carlo validation"};
    app.require_subcommand(1);

    std::string config_path, out_path, which = "lambda", estimator = "is", report = "estimate";
    std::string alphas_text, n_list_text;
    bool force = false, mixed = false, finite_prefactor = false;
    long samples = 100000;
    std::uint64_t seed = 1;
    double delta = 0.0, epsilon = kDefaultNotFlatEpsilon;

    CLI::App* price = app.add_subcommand("price", "Asymptotic tranche pricing report");
    price->add_option("config", config_path)->required();
    price->add_flag("--force", force, "price even when assumptions fail");
    price->add_flag("--mixed-prefactor", mixed, "multiplier/variance from the limiting measure");
    price->add_option("-o,--out", out_path);

    CLI::App* validate = app.add_subcommand("validate", "Assumption checks and oracle suite");
    validate->add_option("config", config_path)->required();
    validate->add_option("--delta", delta, "not-flat window (default T/20)");
    validate->add_option("--eps", epsilon, "not-flat probability threshold");
    validate->add_option("-o,--out", out_path);

    CLI::App* curves = app.add_subcommand("curves", "CSV curve data");
    curves->add_option("config", config_path)->required();
    curves->add_option("--which", which, "lambda | sstar")->required();
    curves->add_option("-o,--out", out_path)->required();
    curves->add_option("--alphas", alphas_text, "comma-separated attachment points (sstar)");
    curves->add_option("--n-list", n_list_text, "comma-separated pool sizes (sstar)");
    curves->add_flag("--finite-prefactor", finite_prefactor,
                     "use the finite-pool measure everywhere (default: limiting prefactor)");

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo estimates and diagnostics");
    mc->add_option("config", config_path)->required();
    mc->add_option("--samples", samples);
    mc->add_option("--seed", seed);
    mc->add_option("--estimator", estimator, "plain | is | both");
    mc->add_option("--report", report, "estimate | hn | clt");
    mc->add_option("-o,--out", out_path);

    CLI::App* pool_gen = app.add_subcommand("pool-gen", "Write the pool as an explicit config");
    pool_gen->add_option("config", config_path)->required();
    pool_gen->add_option("-o,--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed()) return cmd_price(config_path, force, mixed, out_path);
        if (validate->parsed()) return cmd_validate(config_path, delta, epsilon, out_path);
        if (curves->parsed())
            return cmd_curves(config_path, which, out_path, alphas_text, n_list_text,
                              finite_prefactor);
        if (mc->parsed()) return cmd_mc(config_path, samples, seed, estimator, report, out_path);
        if (pool_gen->parsed()) return cmd_pool_gen(config_path, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const AssumptionError& e) {
        std::cerr << "assumption error: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
