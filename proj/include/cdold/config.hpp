#ifndef CDOLD_CONFIG_HPP
#define CDOLD_CONFIG_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdold/correlation.hpp"
#include "cdold/merton.hpp"

namespace cdold {

struct CorrelationConfig {
    enum class Kind { finite_state, gaussian_copula };
    Kind kind = Kind::finite_state;

    // finite_state
    struct State {
        std::string label;
        double prob = 0.0;
        PoolSpec pool;
    };
    std::vector<State> states;

    // gaussian_copula (conditions the top-level pool)
    int M = 1;
    double rho = 0.0;
};

// Parsed run configuration.  pool_builder reconstructs the pool at an
// arbitrary size for curves over N; for explicit pools it returns the fixed
// pool regardless of the requested size.
struct RunSetup {
    TrancheSpec tranche;
    PoolSpec pool;
    std::string pool_kind;
    std::function<PoolSpec(long)> pool_builder;
    std::optional<GammaVolSpec> gamma_spec;  // set for merton_gamma pools
    std::optional<CorrelationConfig> correlation;
};

RunSetup load_config(const std::string& path);
RunSetup parse_config(const std::string& json_text);

// Serializes a pool as an explicit tabulated-name config (used by pool-gen).
// Merton names are sampled on a quadratically clustered grid of `grid_points`
// points over [0, horizon].
std::string explicit_pool_config(const PoolSpec& pool, const TrancheSpec& tranche,
                                 int grid_points = 257);

}  // namespace cdold

#endif
