#pragma once

#include <string>

#include "hicl/learners.hpp"

namespace hicl {

/// Experiment description loaded from a JSON config file; CLI flags may
/// override any scalar field.
struct ExperimentConfig {
    std::string dataset;
    std::string schema;
    std::string taxonomy;
    LearnerSpec learner;
    int k = 10;
    uint64_t seed = 0;
    std::string models = "both";  // hr | fl | both
    std::string output_dir = "out";
    int threads = 0;  // 0 = HICL_THREADS env var, then hardware concurrency
    bool save_models = true;

    static ExperimentConfig parse(std::string_view json_text);
    static ExperimentConfig load(const std::string& path);

    /// Structural checks plus existence of the referenced files.
    /// Missing files raise IoError, other problems ValidationError.
    void validate_for_run() const;

    bool run_hr() const { return models == "hr" || models == "both"; }
    bool run_fl() const { return models == "fl" || models == "both"; }
    int resolved_threads() const;
};

}  // namespace hicl
