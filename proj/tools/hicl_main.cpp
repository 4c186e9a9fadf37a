#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hicl/common.hpp"
#include "hicl/config.hpp"
#include "hicl/report_io.hpp"
#include "hicl/runner.hpp"
#include "hicl/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitPipeline = 3;

void print_error_chain(const std::exception& e, int depth = 0) {
    std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& nested) {
        print_error_chain(nested, depth + 1);
    } catch (...) {
    }
}

int exit_code_for(const std::exception& e) {
    // the innermost error decides between validation/io/pipeline
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& nested) {
        return exit_code_for(nested);
    } catch (...) {
    }
    if (dynamic_cast<const hicl::IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const hicl::ParseError*>(&e)) return kExitValidation;
    if (dynamic_cast<const hicl::ValidationError*>(&e)) return kExitValidation;
    if (dynamic_cast<const hicl::PipelineError*>(&e)) return kExitPipeline;
    return kExitPipeline;
}

void write_file(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hicl::IoError("cannot write '" + path.string() + "'");
    out << bytes;
    if (!out) throw hicl::IoError("write failed for '" + path.string() + "'");
}

int cmd_validate_taxonomy(const std::string& path) {
    if (!fs::exists(path)) throw hicl::IoError("taxonomy file '" + path + "' does not exist");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hicl::IoError("cannot open taxonomy file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        const hicl::TaxonomyTree tree = hicl::parse_taxonomy(text);
        std::cout << "OK: " << tree.families().size() << " families, " << tree.leaf_count()
                  << " leaves + benign ('" << tree.benign_label() << "'), version "
                  << tree.version() << '\n';
        return kExitOk;
    } catch (const hicl::Error& e) {
        std::cerr << "invalid taxonomy: " << e.what() << '\n';
        return kExitValidation;
    }
}

int cmd_run(const hicl::ExperimentConfig& config) {
    const auto files = hicl::run_experiment_files(config);
    std::cout << "wrote " << files.size() << " files under " << config.output_dir << '\n';
    for (const auto& f : files) std::cout << "  " << f << '\n';
    return kExitOk;
}

int cmd_compare(const std::string& hr_path, const std::string& fl_path,
                const std::string& out_dir) {
    for (const auto& p : {hr_path, fl_path}) {
        if (!fs::exists(p)) throw hicl::IoError("report file '" + p + "' does not exist");
    }
    const hicl::EvaluationReport hr = hicl::load_report(hr_path);
    const hicl::EvaluationReport fl = hicl::load_report(fl_path);
    if (hr.model_id != "hr" || fl.model_id != "fl")
        throw hicl::ValidationError("compare: expected an hr report and an fl report");
    const hicl::Comparison cmp = hicl::compare(hr, fl);
    write_file(fs::path(out_dir) / "comparison.json",
               hicl::comparison_to_json(cmp).dump(2) + "\n");
    const std::string text = hicl::comparison_to_text(cmp);
    write_file(fs::path(out_dir) / "comparison.txt", text);
    std::cout << text;
    return kExitOk;
}

int cmd_synth(const std::string& taxonomy_path, const std::string& out_dir, size_t per_leaf,
              size_t dim, double separation, double sigma, double benign_fraction,
              uint64_t seed) {
    if (!fs::exists(taxonomy_path))
        throw hicl::IoError("taxonomy file '" + taxonomy_path + "' does not exist");
    hicl::SyntheticSpec spec;
    spec.taxonomy = hicl::load_taxonomy(taxonomy_path);
    spec.per_leaf = per_leaf;
    spec.dim = dim;
    spec.separation = separation;
    spec.sigma = sigma;
    spec.benign_fraction = benign_fraction;
    spec.seed = seed;
    const hicl::SyntheticData data = hicl::generate_synthetic(spec);
    write_file(fs::path(out_dir) / "data.csv", hicl::synthetic_to_csv(data));
    write_file(fs::path(out_dir) / "schema.json", data.schema.serialize());
    write_file(fs::path(out_dir) / "taxonomy.json", hicl::serialize_taxonomy(spec.taxonomy));
    std::cout << "wrote " << data.table.row_count << " rows ("
              << spec.taxonomy.leaf_count() + 1 << " level-3 classes) under " << out_dir << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taxonomy-driven hierarchical vs flat intrusion classification benchmark"};
    app.require_subcommand(1);

    // validate-taxonomy
    std::string taxonomy_path;
    auto* validate = app.add_subcommand("validate-taxonomy", "check a taxonomy spec file");
    validate->add_option("path", taxonomy_path, "taxonomy JSON file")->required();

    // run
    std::string config_path;
    std::string opt_dataset, opt_schema, opt_taxonomy, opt_models, opt_output, opt_algorithm;
    int opt_k = -1, opt_threads = -1, opt_trees = -1, opt_mss = -1, opt_maxf = -1, opt_knn = -1;
    int opt_lr_epochs = -1, opt_max_depth = -2, opt_bootstrap = -1, opt_save_models = -1;
    double opt_lr_rate = -1.0, opt_lr_l2 = -1.0;
    int64_t opt_seed = -1, opt_seed_salt = -1;
    auto* run = app.add_subcommand("run", "run a cross-validated HR/FL experiment");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--dataset", opt_dataset, "override dataset CSV path");
    run->add_option("--schema", opt_schema, "override schema path");
    run->add_option("--taxonomy", opt_taxonomy, "override taxonomy path");
    run->add_option("--models", opt_models, "override models to run (hr|fl|both)");
    run->add_option("--output-dir", opt_output, "override output directory");
    run->add_option("--algorithm", opt_algorithm, "override learner algorithm");
    run->add_option("--k", opt_k, "override fold count");
    run->add_option("--seed", opt_seed, "override master seed");
    run->add_option("--threads", opt_threads, "override thread budget (0 = auto)");
    run->add_option("--trees", opt_trees, "override ensemble size");
    run->add_option("--max-depth", opt_max_depth, "override tree depth cap (-1 = unlimited)");
    run->add_option("--min-samples-split", opt_mss, "override CART split minimum");
    run->add_option("--bootstrap", opt_bootstrap, "override rf bootstrap (0|1)");
    run->add_option("--max-features", opt_maxf, "override per-split feature budget (0 = sqrt)");
    run->add_option("--knn-k", opt_knn, "override neighbour count");
    run->add_option("--lr-rate", opt_lr_rate, "override learning rate");
    run->add_option("--lr-epochs", opt_lr_epochs, "override epochs");
    run->add_option("--lr-l2", opt_lr_l2, "override L2 penalty");
    run->add_option("--seed-salt", opt_seed_salt, "override learner seed salt");
    run->add_option("--save-models", opt_save_models, "override model bundle export (0|1)");

    // compare
    std::string hr_path, fl_path, compare_out = ".";
    auto* comp = app.add_subcommand("compare", "compare an HR report with an FL report");
    comp->add_option("hr_report", hr_path, "HR report JSON")->required();
    comp->add_option("fl_report", fl_path, "FL report JSON")->required();
    comp->add_option("-o,--out", compare_out, "output directory");

    // synth
    std::string synth_taxonomy, synth_out = "synth";
    size_t per_leaf = 100, dim = 4;
    double separation = 3.0, sigma = 1.0, benign_fraction = 0.3;
    uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "generate a family-coherent synthetic dataset");
    synth->add_option("--taxonomy", synth_taxonomy, "taxonomy JSON file")->required();
    synth->add_option("-o,--out", synth_out, "output directory");
    synth->add_option("--per-leaf", per_leaf, "samples per attack subtype");
    synth->add_option("--dim", dim, "feature dimension");
    synth->add_option("--separation", separation, "cluster separation scale");
    synth->add_option("--sigma", sigma, "per-dimension noise");
    synth->add_option("--benign-fraction", benign_fraction, "benign share of rows");
    synth->add_option("--seed", synth_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (validate->parsed()) return cmd_validate_taxonomy(taxonomy_path);
        if (run->parsed()) {
            if (!fs::exists(config_path))
                throw hicl::IoError("config file '" + config_path + "' does not exist");
            hicl::ExperimentConfig config = hicl::ExperimentConfig::load(config_path);
            if (!opt_dataset.empty()) config.dataset = opt_dataset;
            if (!opt_schema.empty()) config.schema = opt_schema;
            if (!opt_taxonomy.empty()) config.taxonomy = opt_taxonomy;
            if (!opt_models.empty()) config.models = opt_models;
            if (!opt_output.empty()) config.output_dir = opt_output;
            if (!opt_algorithm.empty())
                config.learner.algorithm = hicl::algorithm_from_name(opt_algorithm);
            if (opt_k >= 0) config.k = opt_k;
            if (opt_seed >= 0) config.seed = static_cast<uint64_t>(opt_seed);
            if (opt_threads >= 0) config.threads = opt_threads;
            if (opt_trees >= 0) config.learner.trees = opt_trees;
            if (opt_max_depth >= -1) {
                if (opt_max_depth < 0)
                    config.learner.max_depth.reset();
                else
                    config.learner.max_depth = opt_max_depth;
            }
            if (opt_mss >= 0) config.learner.min_samples_split = opt_mss;
            if (opt_bootstrap >= 0) config.learner.bootstrap = opt_bootstrap != 0;
            if (opt_maxf >= 0) config.learner.max_features = opt_maxf;
            if (opt_knn >= 0) config.learner.knn_k = opt_knn;
            if (opt_lr_rate > 0) config.learner.lr_rate = opt_lr_rate;
            if (opt_lr_epochs >= 0) config.learner.lr_epochs = opt_lr_epochs;
            if (opt_lr_l2 >= 0) config.learner.lr_l2 = opt_lr_l2;
            if (opt_seed_salt >= 0) config.learner.seed_salt = static_cast<uint64_t>(opt_seed_salt);
            if (opt_save_models >= 0) config.save_models = opt_save_models != 0;
            return cmd_run(config);
        }
        if (comp->parsed()) return cmd_compare(hr_path, fl_path, compare_out);
        if (synth->parsed())
            return cmd_synth(synth_taxonomy, synth_out, per_leaf, dim, separation, sigma,
                             benign_fraction, synth_seed);
    } catch (const std::exception& e) {
        print_error_chain(e);
        return exit_code_for(e);
    }
    return kExitValidation;
}
