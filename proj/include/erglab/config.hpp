#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace erglab {

// Parsed experiment configuration. `params` carries experiment-specific
// keys (validated against the experiment registry); everything else is
// shared plumbing.
struct ExperimentConfig {
    std::string experiment;
    std::string model;  // builtin name or path ("file:..." or bare path)
    std::map<std::string, std::string> params;  // values as JSON literals
    std::string backend = "float";              // float | exact
    int threads = 1;
    std::string out;  // output directory; empty = stdout only
    std::string format = "json";  // json | csv
    double tolerance = 0.1;
    std::uint64_t seed = 0;
};

// Parse and validate a JSON config. Unknown keys (top level or params)
// are rejected naming the offending key and the nearest valid one.
// Throws ConfigError (exit code 2 at the CLI).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& text);

// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

// Config echo embedded in reports: excludes execution-only fields
// (threads, out) so outputs stay byte-identical across runs.
std::string config_echo(const ExperimentConfig& cfg);

// Known experiment names and their allowed parameter keys.
const std::map<std::string, std::vector<std::string>>& experiment_registry();

// Levenshtein-nearest valid key, for error messages.
std::string nearest_key(const std::string& key,
                        const std::vector<std::string>& valid);

}  // namespace erglab
