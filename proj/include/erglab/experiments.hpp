#pragma once

#include "erglab/config.hpp"
#include "erglab/report.hpp"

#include <map>
#include <string>

namespace erglab {

// Property tag attached to each experiment's report; the registry is the
// audited catalogue of asymptotic statements the tool can probe.
const std::map<std::string, std::string>& experiment_tags();

// Executes the named experiment. Throws ConfigError for usage problems;
// other exceptions indicate computation errors. Check failures are
// reported inside the Report (CLI exit code 1).
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace erglab
