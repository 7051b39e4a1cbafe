#include "erglab/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <stdexcept>

namespace erglab {

using json = nlohmann::ordered_json;

const std::map<std::string, std::vector<std::string>>& experiment_registry() {
    static const std::map<std::string, std::vector<std::string>> reg = {
        {"renewal", {"n", "d", "state"}},
        {"correlation", {"d", "window_lo", "window_hi", "fiber", "word"}},
        {"recurrence", {"d", "n_max", "expect", "witness_n_max"}},
        {"farey", {"d", "bound"}},
        {"psi-moments", {"d", "nu", "n_grid"}},
        {"semiflow-llt", {"roof", "n_grid", "t_mode", "word"}},
        {"lll", {"roof", "t", "m_grid", "interval", "y", "word"}},
        {"bell", {"roof", "t_grid", "m_grid"}},
        {"hyp-geometry", {"samples", "eta", "rho"}},
        {"group-enum", {"group", "max_len"}},
        {"orbital", {"group", "max_len", "s_grid", "eps"}},
        {"cover-count", {"group", "max_len", "t_grid", "eps", "kappa"}},
        {"report", {"input"}},
    };
    return reg;
}

namespace {

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const std::vector<std::string> kTopKeys = {
    "experiment", "model", "params",    "backend",
    "threads",    "out",   "format",    "tolerance",
    "seed"};

}  // namespace

std::string nearest_key(const std::string& key,
                        const std::vector<std::string>& valid) {
    std::string best;
    int best_d = 1 << 20;
    for (const auto& v : valid) {
        int d = edit_distance(key, v);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    for (const auto& [key, _] : j.items()) {
        if (std::find(kTopKeys.begin(), kTopKeys.end(), key) == kTopKeys.end())
            throw ConfigError("unknown config key \"" + key +
                              "\" (nearest valid key: \"" +
                              nearest_key(key, kTopKeys) + "\")");
    }

    ExperimentConfig cfg;
    if (!j.contains("experiment"))
        throw ConfigError("config needs an \"experiment\" key");
    cfg.experiment = j["experiment"].get<std::string>();
    const auto& reg = experiment_registry();
    auto it = reg.find(cfg.experiment);
    if (it == reg.end()) {
        std::vector<std::string> names;
        for (const auto& kv : reg) names.push_back(kv.first);
        throw ConfigError("unknown experiment \"" + cfg.experiment +
                          "\" (nearest: \"" +
                          nearest_key(cfg.experiment, names) + "\")");
    }

    cfg.model = j.value("model", std::string());
    if (j.contains("params")) {
        if (!j["params"].is_object())
            throw ConfigError("params must be an object");
        for (const auto& [key, value] : j["params"].items()) {
            if (std::find(it->second.begin(), it->second.end(), key) ==
                it->second.end())
                throw ConfigError("unknown param \"" + key +
                                  "\" for experiment \"" + cfg.experiment +
                                  "\" (nearest valid key: \"" +
                                  nearest_key(key, it->second) + "\")");
            cfg.params[key] = value.dump();
        }
    }
    cfg.backend = j.value("backend", std::string("float"));
    if (cfg.backend != "float" && cfg.backend != "exact")
        throw ConfigError("backend must be \"float\" or \"exact\"");
    cfg.threads = j.value("threads", 1);
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    cfg.out = j.value("out", std::string());
    cfg.format = j.value("format", std::string("json"));
    if (cfg.format != "json" && cfg.format != "csv")
        throw ConfigError("format must be \"json\" or \"csv\"");
    cfg.tolerance = j.value("tolerance", 0.1);
    if (!(cfg.tolerance > 0)) throw ConfigError("tolerance must be > 0");
    cfg.seed = j.value("seed", 0ULL);
    return cfg;
}

namespace {

json config_to_json(const ExperimentConfig& cfg, bool echo) {
    json j;
    j["experiment"] = cfg.experiment;
    j["model"] = cfg.model;
    json params = json::object();
    for (const auto& [k, v] : cfg.params) params[k] = json::parse(v);
    j["params"] = params;
    j["backend"] = cfg.backend;
    if (!echo) {
        j["threads"] = cfg.threads;
        j["out"] = cfg.out;
    }
    j["format"] = cfg.format;
    j["tolerance"] = cfg.tolerance;
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    return config_to_json(cfg, false).dump(2) + "\n";
}

std::string config_echo(const ExperimentConfig& cfg) {
    return config_to_json(cfg, true).dump();
}

}  // namespace erglab
