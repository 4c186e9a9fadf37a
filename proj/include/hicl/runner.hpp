#pragma once

#include <string>
#include <vector>

#include "hicl/config.hpp"

namespace hicl {

/// Runs the configured experiment and writes reports, CSV exports and model
/// bundles under the output directory. Returns the written paths. On any
/// failure the partial outputs of this invocation are removed before the
/// error propagates.
std::vector<std::string> run_experiment_files(const ExperimentConfig& config);

}  // namespace hicl
