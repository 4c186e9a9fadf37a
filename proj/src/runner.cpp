#include "hicl/runner.hpp"

#include <filesystem>
#include <fstream>

#include "hicl/common.hpp"
#include "hicl/report_io.hpp"

namespace hicl {

namespace fs = std::filesystem;

namespace {

/// Records everything written so a failed run can clean up after itself.
class OutputStage {
public:
    explicit OutputStage(fs::path root) : root_(std::move(root)) {}

    void write(const fs::path& relative, const std::string& bytes) {
        const fs::path full = root_ / relative;
        fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary);
        if (!out) throw IoError("cannot write '" + full.string() + "'");
        out << bytes;
        if (!out) throw IoError("write failed for '" + full.string() + "'");
        written_.push_back(full.string());
    }

    void adopt_directory(const fs::path& dir) { adopted_dirs_.push_back(dir); }

    void rollback() {
        std::error_code ec;
        for (const auto& path : written_) fs::remove(path, ec);
        for (const auto& dir : adopted_dirs_) fs::remove_all(dir, ec);
        written_.clear();
        adopted_dirs_.clear();
    }

    std::vector<std::string> release() {
        for (const auto& dir : adopted_dirs_) {
            for (const auto& entry : fs::recursive_directory_iterator(dir)) {
                if (entry.is_regular_file()) written_.push_back(entry.path().string());
            }
        }
        adopted_dirs_.clear();
        return std::move(written_);
    }

private:
    fs::path root_;
    std::vector<std::string> written_;
    std::vector<fs::path> adopted_dirs_;
};

void export_model_reports(OutputStage& stage, const EvaluationReport& report,
                          const ExperimentResult& result, const ExperimentConfig& config) {
    const std::string& id = report.model_id;
    stage.write("report_" + id + ".json", report_to_json(report).dump(2) + "\n");
    for (int level = 1; level <= 3; ++level) {
        stage.write("confusion_" + id + "_level" + std::to_string(level) + ".csv",
                    confusion_csv(report.levels[static_cast<size_t>(level - 1)].pooled));
    }
    stage.write("fn_" + id + ".csv", fn_csv(report.fn));
    stage.write("fp_" + id + ".csv", fp_csv(report.fp));
    if (config.save_models) {
        for (const FoldResult& fold : result.folds) {
            const fs::path dir = fs::path(config.output_dir) / "models" / id /
                                 ("fold_" + std::to_string(fold.fold));
            if (id == "hr" && fold.hr_model) {
                save_hierarchical(*fold.hr_model, dir.string());
                stage.adopt_directory(dir);
            } else if (id == "fl" && fold.fl_model) {
                save_flat(*fold.fl_model, dir.string());
                stage.adopt_directory(dir);
            }
        }
    }
}

}  // namespace

std::vector<std::string> run_experiment_files(const ExperimentConfig& config) {
    config.validate_for_run();

    const TaxonomyTree tree = load_taxonomy(config.taxonomy);
    const DatasetSchema schema = DatasetSchema::load(config.schema);
    const DataTable table = load_csv(config.dataset, schema);

    ExperimentRequest request;
    request.spec = config.learner;
    request.k = config.k;
    request.seed = config.seed;
    request.run_hr = config.run_hr();
    request.run_fl = config.run_fl();
    request.threads = config.resolved_threads();
    request.keep_models = config.save_models;

    const ExperimentResult result = run_cv_experiment(table, tree, request);

    fs::create_directories(config.output_dir);
    OutputStage stage{fs::path(config.output_dir)};
    try {
        std::string metrics;
        std::string timings;
        EvaluationReport hr_report, fl_report;
        if (request.run_hr) {
            hr_report = evaluate_model("hr", result, tree);
            hr_report.dataset = config.dataset;
            hr_report.schema = config.schema;
            hr_report.taxonomy = config.taxonomy;
            hr_report.learner = config.learner;
            export_model_reports(stage, hr_report, result, config);
            metrics += metrics_csv(hr_report);
            timings += timings_csv(hr_report);
        }
        if (request.run_fl) {
            fl_report = evaluate_model("fl", result, tree);
            fl_report.dataset = config.dataset;
            fl_report.schema = config.schema;
            fl_report.taxonomy = config.taxonomy;
            fl_report.learner = config.learner;
            export_model_reports(stage, fl_report, result, config);
            if (metrics.empty()) {
                metrics = metrics_csv(fl_report);
                timings = timings_csv(fl_report);
            } else {
                // drop the duplicate header when appending the second model
                std::string body = metrics_csv(fl_report);
                metrics += body.substr(body.find('\n') + 1);
                body = timings_csv(fl_report);
                timings += body.substr(body.find('\n') + 1);
            }
        }
        stage.write("metrics.csv", metrics);
        stage.write("timings.csv", timings);
        if (request.run_hr && request.run_fl) {
            const Comparison cmp = compare(hr_report, fl_report);
            stage.write("comparison.json", comparison_to_json(cmp).dump(2) + "\n");
            stage.write("comparison.txt", comparison_to_text(cmp));
        }
        return stage.release();
    } catch (...) {
        stage.rollback();
        throw;
    }
}

}  // namespace hicl
