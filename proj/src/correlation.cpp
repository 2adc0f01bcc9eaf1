#include "cdold/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cdold/special.hpp"
#include "cdold/support.hpp"

namespace cdold {

void SystemicMixture::validate() const {
    if (states.empty()) throw ConfigError("mixture: no states");
    NeumaierSum s;
    for (const auto& st : states) {
        if (!(st.prob > 0.0)) throw ConfigError("mixture: state probabilities must be positive");
        s.add(st.prob);
    }
    if (std::abs(s.value() - 1.0) > 1e-12)
        throw ConfigError("mixture: state probabilities must sum to 1");
}

MixtureResult mixture_protection_leg(const SystemicMixture& mix, const TrancheSpec& tranche,
                                     long N, bool enforce_ig) {
    mix.validate();
    tranche.validate();

    std::vector<MixtureRow> rows;
    rows.reserve(mix.states.size());
    for (const auto& st : mix.states) {
        MixtureRow row;
        row.label = st.label;
        row.prob = st.prob;
        row.mean = st.measure.mean();
        row.ig_ok = row.mean < tranche.alpha;
        if (!row.ig_ok && enforce_ig)
            throw AssumptionError("mixture: state '" + st.label +
                                  "' violates the per-state investment-grade condition (mean " +
                                  fmt_g17(row.mean) + " >= alpha)");
        try {
            AsymptoticResult res = spread_asymptotic(st.measure, tranche, N);
            row.lambda = res.lambda;
            row.rate = res.rate;
            row.sigma_sq = res.sigma_sq;
            row.protection_leg = res.protection_leg;
        } catch (const AssumptionError&) {
            if (enforce_ig) throw;
            // Override mode: the state stays in the report and its NaN leg
            // propagates into the total rather than being silently dropped.
            row.lambda = std::numeric_limits<double>::quiet_NaN();
            row.rate = std::numeric_limits<double>::quiet_NaN();
            row.sigma_sq = std::numeric_limits<double>::quiet_NaN();
            row.protection_leg = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const MixtureRow& a, const MixtureRow& b) { return a.label < b.label; });

    MixtureResult out;
    NeumaierSum total;
    for (const auto& row : rows) total.add(row.prob * row.protection_leg);
    out.protection_leg = total.value();
    out.premium_leg = premium_leg(tranche);
    out.spread = out.protection_leg / out.premium_leg;
    out.rows = std::move(rows);
    return out;
}

DominantState dominant_state(const SystemicMixture& mix, const TrancheSpec& tranche, long N) {
    MixtureResult res = mixture_protection_leg(mix, tranche, N);
    std::size_t best = 0;
    for (std::size_t i = 1; i < res.rows.size(); ++i)
        if (res.rows[i].rate < res.rows[best].rate) best = i;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        if (i == best) continue;
        if (std::abs(res.rows[i].rate - res.rows[best].rate) <= 1e-12)
            throw AssumptionError("dominant_state: no unique dominant state (rates tie between '" +
                                  res.rows[best].label + "' and '" + res.rows[i].label + "')");
    }
    return {res.rows[best].label, res.rows[best].prob * res.rows[best].protection_leg};
}

CopulaGrid gaussian_copula_grid(int M, double rho) {
    if (M < 1) throw ConfigError("gaussian_copula_grid: M must be >= 1");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("gaussian_copula_grid: rho must lie in (0,1)");

    CopulaGrid grid;
    grid.M = M;
    grid.rho = rho;
    const long half = static_cast<long>(M) * M;
    const std::size_t count = static_cast<std::size_t>(2 * half + 1);
    grid.nodes.resize(count);
    grid.probs.resize(count);

    // One CDF evaluation per bin boundary; interior probabilities are the
    // increments and the last bin absorbs the upper tail so the total is
    // exactly one.
    std::vector<double> boundary(count);  // Phi(x_i + 1/(2M)) shared between neighbors
    for (std::size_t j = 0; j < count; ++j) {
        long i = static_cast<long>(j) - half;
        grid.nodes[j] = static_cast<double>(i) / M;
        boundary[j] = norm_cdf(grid.nodes[j] + 0.5 / M);
    }
    grid.probs[0] = boundary[0];
    double partial = grid.probs[0];
    for (std::size_t j = 1; j + 1 < count; ++j) {
        grid.probs[j] = boundary[j] - boundary[j - 1];
        partial += grid.probs[j];
    }
    grid.probs[count - 1] = 1.0 - partial;
    return grid;
}

double conditional_default_prob(double p, double rho, double x) {
    if (!(p >= 0.0 && p <= 1.0)) throw NumericError("conditional_default_prob: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return p;
    return norm_cdf((norm_quantile(p) - rho * x) / std::sqrt(1.0 - rho * rho));
}

SystemicMixture copula_mixture(const CopulaGrid& grid, const LossProbMeasure& base) {
    SystemicMixture mix;
    mix.states.reserve(grid.nodes.size());
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        std::vector<LossProbMeasure::Atom> atoms;
        atoms.reserve(base.atoms().size());
        for (const auto& a : base.atoms())
            atoms.push_back({conditional_default_prob(a.p, grid.rho, grid.nodes[j]), a.w});
        char label[32];
        std::snprintf(label, sizeof label, "x%+04ld", static_cast<long>(j) - grid.M * grid.M);
        mix.states.push_back({label, grid.probs[j], LossProbMeasure(std::move(atoms))});
    }
    return mix;
}

}  // namespace cdold
