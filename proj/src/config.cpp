#include "cdold/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdold/support.hpp"

namespace cdold {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("config: missing or non-numeric field '") + key + "'");
    return j[key].get<double>();
}

long require_integer(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ConfigError(std::string("config: missing or non-integer field '") + key + "'");
    return j[key].get<long>();
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError(std::string("config: missing or non-string field '") + key + "'");
    return j[key].get<std::string>();
}

TrancheSpec parse_tranche(const json& j) {
    TrancheSpec t;
    t.alpha = require_number(j, "alpha");
    t.beta = require_number(j, "beta");
    t.rate = require_number(j, "R");
    t.horizon = require_number(j, "T");
    if (!j.contains("premium_dates") || !j["premium_dates"].is_array())
        throw ConfigError("config: tranche.premium_dates must be an array");
    for (const auto& v : j["premium_dates"]) {
        if (!v.is_number()) throw ConfigError("config: premium date must be numeric");
        t.premium_dates.push_back(v.get<double>());
    }
    try {
        t.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return t;
}

DefaultDistribution parse_name(const json& j) {
    if (j.contains("merton")) {
        const json& m = j["merton"];
        MertonParams mp;
        mp.theta = require_number(m, "theta");
        mp.K = require_number(m, "K");
        mp.sigma = require_number(m, "sigma");
        return DefaultDistribution::merton(mp);
    }
    if (j.contains("cdf")) {
        if (!j["cdf"].is_array()) throw ConfigError("config: name.cdf must be an array of pairs");
        std::vector<double> times, values;
        for (const auto& pair : j["cdf"]) {
            if (!pair.is_array() || pair.size() != 2)
                throw ConfigError("config: name.cdf entries must be [t, F] pairs");
            times.push_back(pair[0].get<double>());
            values.push_back(pair[1].get<double>());
        }
        double tail = j.contains("tail_mass") ? require_number(j, "tail_mass")
                                              : 1.0 - (values.empty() ? 0.0 : values.back());
        return DefaultDistribution::tabulated(std::move(times), std::move(values), tail);
    }
    throw ConfigError("config: a name needs either 'cdf' or 'merton'");
}

struct ParsedPool {
    PoolSpec pool;
    std::string kind;
    std::function<PoolSpec(long)> builder;
    std::optional<GammaVolSpec> gamma_spec;
};

ParsedPool parse_pool(const json& j) {
    ParsedPool out;
    out.kind = require_string(j, "kind");
    if (out.kind == "merton_gamma") {
        GammaVolSpec gv;
        gv.scale = require_number(j, "sigma_scale");
        gv.shape = require_number(j, "sigma_shape");
        double theta = require_number(j, "theta");
        double K = require_number(j, "K");
        long N = require_integer(j, "N");
        double horizon = 0.0;  // pool construction does not depend on it
        out.builder = [gv, theta, K, horizon](long n) {
            return build_gamma_merton_pool(gv, theta, K, static_cast<int>(n), horizon);
        };
        out.pool = out.builder(N);
        out.gamma_spec = gv;
        return out;
    }
    if (out.kind == "explicit") {
        if (!j.contains("names") || !j["names"].is_array() || j["names"].empty())
            throw ConfigError("config: explicit pool needs a nonempty 'names' array");
        for (const auto& name : j["names"]) out.pool.names.push_back(parse_name(name));
        PoolSpec fixed = out.pool;
        out.builder = [fixed](long) { return fixed; };
        return out;
    }
    if (out.kind == "two_type") {
        long N = require_integer(j, "N");
        if (N < 1) throw ConfigError("config: two_type pool needs N >= 1");
        if (!j.contains("name_a") || !j.contains("name_b"))
            throw ConfigError("config: two_type pool needs 'name_a' and 'name_b'");
        DefaultDistribution a = parse_name(j["name_a"]);
        DefaultDistribution b = parse_name(j["name_b"]);
        auto build = [a, b](long n) {
            PoolSpec p;
            p.names.reserve(n);
            for (long k = 1; k <= n; ++k) p.names.push_back(k % 3 == 0 ? a : b);
            return p;
        };
        out.builder = build;
        out.pool = build(N);
        return out;
    }
    throw ConfigError("config: unknown pool kind '" + out.kind + "'");
}

CorrelationConfig parse_correlation(const json& j) {
    CorrelationConfig c;
    std::string kind = require_string(j, "kind");
    if (kind == "finite_state") {
        c.kind = CorrelationConfig::Kind::finite_state;
        if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
            throw ConfigError("config: finite_state correlation needs a nonempty 'states' array");
        for (const auto& st : j["states"]) {
            CorrelationConfig::State state;
            state.label = require_string(st, "label");
            state.prob = require_number(st, "prob");
            if (!st.contains("pool")) throw ConfigError("config: correlation state needs a pool");
            state.pool = parse_pool(st["pool"]).pool;
            c.states.push_back(std::move(state));
        }
        return c;
    }
    if (kind == "gaussian_copula") {
        c.kind = CorrelationConfig::Kind::gaussian_copula;
        c.M = static_cast<int>(require_integer(j, "M"));
        c.rho = require_number(j, "rho");
        return c;
    }
    throw ConfigError("config: unknown correlation kind '" + kind + "'");
}

}  // namespace

RunSetup parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != 1)
        throw ConfigError("config: schema_version must be 1");
    if (!j.contains("tranche")) throw ConfigError("config: missing 'tranche'");
    if (!j.contains("pool")) throw ConfigError("config: missing 'pool'");

    RunSetup setup;
    setup.tranche = parse_tranche(j["tranche"]);
    ParsedPool pp = parse_pool(j["pool"]);
    setup.pool = std::move(pp.pool);
    setup.pool_kind = pp.kind;
    setup.pool_builder = std::move(pp.builder);
    setup.gamma_spec = pp.gamma_spec;
    setup.pool.validate();
    if (j.contains("correlation")) setup.correlation = parse_correlation(j["correlation"]);
    return setup;
}

RunSetup load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string explicit_pool_config(const PoolSpec& pool, const TrancheSpec& tranche,
                                 int grid_points) {
    json names = json::array();
    for (const auto& d : pool.names) {
        json name;
        if (d.is_merton()) {
            json cdf = json::array();
            for (int k = 0; k < grid_points; ++k) {
                double x = static_cast<double>(k) / (grid_points - 1);
                double t = tranche.horizon * x * x;
                cdf.push_back(json::array({t, d.cdf(t)}));
            }
            name["cdf"] = std::move(cdf);
            name["tail_mass"] = 1.0 - d.cdf(tranche.horizon);
        } else {
            json cdf = json::array();
            const auto& t = d.grid_times();
            const auto& f = d.grid_cdf();
            for (std::size_t k = 0; k < t.size(); ++k) cdf.push_back(json::array({t[k], f[k]}));
            name["cdf"] = std::move(cdf);
            name["tail_mass"] = d.tail_mass();
        }
        names.push_back(std::move(name));
    }
    json out = {
        {"schema_version", 1},
        {"tranche",
         {{"alpha", tranche.alpha},
          {"beta", tranche.beta},
          {"R", tranche.rate},
          {"T", tranche.horizon},
          {"premium_dates", tranche.premium_dates}}},
        {"pool", {{"kind", "explicit"}, {"names", std::move(names)}}},
    };
    return out.dump(2) + "\n";
}

}  // namespace cdold
