#include "hicl/models.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hicl/common.hpp"

namespace hicl {

namespace fs = std::filesystem;

std::vector<std::string> NodePredictor::predict(const FeatureMatrix& X, int threads) const {
    if (model) return model->predict(X, threads);
    return std::vector<std::string>(X.rows, constant);
}

const NodePredictor& HierarchicalModel::family_node(const std::string& family) const {
    for (const auto& [label, node] : c3) {
        if (label == family) return node;
    }
    throw ValidationError("hierarchical model has no node for family '" + family + "'");
}

const Fitter& default_fitter() {
    static const Fitter fitter = [](const LearnerSpec& spec, const FeatureMatrix& X,
                                    std::span<const std::string> y, uint64_t seed, int threads) {
        return fit_model(spec, X, y, seed, threads);
    };
    return fitter;
}

namespace {

// fits a node, or collapses to a constant when only one class is present
NodePredictor fit_node(const Fitter& fitter, const LearnerSpec& spec, const FeatureMatrix& X,
                       std::span<const size_t> rows, std::span<const std::string> y,
                       uint64_t node_seed, int threads) {
    std::set<std::string_view> distinct(y.begin(), y.end());
    if (distinct.size() == 1) return NodePredictor{nullptr, std::string(*distinct.begin())};
    return NodePredictor{fitter(spec, X.gather_rows(rows), y, node_seed, threads), ""};
}

}  // namespace

HierarchicalModel fit_hierarchical(const FeatureMatrix& X, const LabelFrame& labels,
                                   const TaxonomyTree& tree, const LearnerSpec& spec,
                                   uint64_t seed, int threads, const Fitter& fitter) {
    if (X.rows != labels.size())
        throw ValidationError("fit_hierarchical: labels must align with the matrix");
    std::vector<size_t> all_rows(X.rows);
    for (size_t i = 0; i < X.rows; ++i) all_rows[i] = i;
    NodeTrainingSets sets = node_training_sets(labels, tree, all_rows);

    const bool has_benign = sets.level2_rows.size() < sets.level1_rows.size();
    const bool has_attack = !sets.level2_rows.empty();
    if (!has_benign || !has_attack)
        throw PipelineError("fit_hierarchical: level-1 class missing (training data is all " +
                            std::string(has_attack ? "attack" : "benign") + ")");

    HierarchicalModel model;
    model.taxonomy = tree;
    model.spec = spec;
    model.c1 = NodePredictor{
        fitter(spec, X, sets.level1_y, derive_seed(seed, std::string_view("hr/c1")), threads), ""};
    model.c2 = fit_node(fitter, spec, X, sets.level2_rows, sets.level2_y,
                        derive_seed(seed, std::string_view("hr/c2")), threads);

    for (const auto& fam_set : sets.level3) {
        if (fam_set.rows.empty()) {
            // family never seen in training: route to its first subtype and
            // record the fallback for the report
            const FamilyNode* fam = tree.find_family(fam_set.family);
            model.c3.emplace_back(fam_set.family, NodePredictor{nullptr, fam->subtypes.front()});
            model.fallback_families.push_back(fam_set.family);
            continue;
        }
        const uint64_t node_seed = derive_seed(seed, "hr/c3/" + fam_set.family);
        model.c3.emplace_back(
            fam_set.family, fit_node(fitter, spec, X, fam_set.rows, fam_set.y, node_seed, threads));
    }
    return model;
}

std::vector<PredictionTriple> predict_hierarchical(const HierarchicalModel& model,
                                                   const FeatureMatrix& X, int threads) {
    const TaxonomyTree& tree = model.taxonomy;
    std::vector<PredictionTriple> out(X.rows);

    const std::vector<std::string> l1 = model.c1.predict(X, threads);
    std::vector<size_t> attack_rows;
    for (size_t r = 0; r < X.rows; ++r) {
        if (l1[r] == kAttackClass) {
            attack_rows.push_back(r);
        } else {
            out[r] = PredictionTriple{Level1::benign, tree.benign_label(), tree.benign_label()};
        }
    }
    if (attack_rows.empty()) return out;

    const FeatureMatrix attack_X = X.gather_rows(attack_rows);
    const std::vector<std::string> l2 = model.c2.predict(attack_X, threads);

    // group attack rows by predicted family, keep taxonomy order
    std::unordered_map<std::string_view, std::vector<size_t>> by_family;
    for (size_t i = 0; i < attack_rows.size(); ++i) by_family[l2[i]].push_back(i);
    for (const auto& [family, node] : model.c3) {
        auto it = by_family.find(family);
        if (it == by_family.end()) continue;
        const std::vector<size_t>& members = it->second;
        const FeatureMatrix family_X = attack_X.gather_rows(members);
        const std::vector<std::string> l3 = node.predict(family_X, threads);
        for (size_t j = 0; j < members.size(); ++j) {
            const size_t r = attack_rows[members[j]];
            out[r] = PredictionTriple{Level1::attack, std::string(family), l3[j]};
        }
    }
    return out;
}

FlatModel fit_flat(const FeatureMatrix& X, const LabelFrame& labels, const TaxonomyTree& tree,
                   const LearnerSpec& spec, uint64_t seed, int threads, const Fitter& fitter) {
    if (X.rows == 0) throw ValidationError("fit_flat: empty training data");
    if (X.rows != labels.size())
        throw ValidationError("fit_flat: labels must align with the matrix");
    FlatModel model;
    model.taxonomy = tree;
    model.spec = spec;
    model.model = fitter(spec, X, labels.level3, derive_seed(seed, std::string_view("fl")), threads);
    return model;
}

std::vector<PredictionTriple> predict_flat(const FlatModel& model, const FeatureMatrix& X,
                                           int threads) {
    const std::vector<std::string> leaves = model.model->predict(X, threads);
    std::vector<PredictionTriple> out;
    out.reserve(leaves.size());
    for (const auto& leaf : leaves) {
        LeafPath path = leaf_path(model.taxonomy, leaf);
        out.push_back(PredictionTriple{path.level1, std::move(path.level2), std::move(path.level3)});
    }
    return out;
}

size_t trained_classifier_count(const HierarchicalModel& model) {
    size_t n = model.c1.is_constant() ? 0 : 1;
    if (!model.c2.is_constant()) ++n;
    for (const auto& [family, node] : model.c3) {
        if (!node.is_constant()) ++n;
    }
    return n;
}

size_t count_fallback_routed(const HierarchicalModel& model,
                             std::span<const PredictionTriple> preds) {
    if (model.fallback_families.empty()) return 0;
    const std::set<std::string> fallback(model.fallback_families.begin(),
                                         model.fallback_families.end());
    size_t n = 0;
    for (const auto& p : preds) {
        if (p.level1 == Level1::attack && fallback.contains(p.level2)) ++n;
    }
    return n;
}

ExperimentResult run_cv_experiment(const DataTable& table, const TaxonomyTree& tree,
                                   const ExperimentRequest& request, const Fitter& fitter) {
    request.spec.validate();
    if (request.k < 2) throw ValidationError("experiment: k must be >= 2");
    if (!request.run_hr && !request.run_fl)
        throw ValidationError("experiment: at least one of hr/fl must run");

    const LabelFrame labels = derive_labels(table, tree);
    ExperimentResult result;
    result.plan = stratified_kfold(labels.level3, request.k, request.seed);
    result.folds.resize(static_cast<size_t>(request.k));

    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };

    for (int fold = 0; fold < request.k; ++fold) {
        try {
            FoldResult& out = result.folds[static_cast<size_t>(fold)];
            out.fold = fold;
            const std::vector<size_t> train_rows = result.plan.train_rows(fold);
            out.test_rows = result.plan.test_rows(fold);

            const Encoder encoder = Encoder::fit(table, train_rows);
            const FeatureMatrix X_train = encoder.apply(table, train_rows);
            const FeatureMatrix X_test = encoder.apply(table, out.test_rows);
            const LabelFrame y_train = slice(labels, train_rows);
            out.truth = slice(labels, out.test_rows);

            const uint64_t fold_seed = derive_seed(request.seed, static_cast<uint64_t>(fold));
            if (request.run_hr) {
                const auto t0 = clock::now();
                HierarchicalModel hr = fit_hierarchical(X_train, y_train, tree, request.spec,
                                                        fold_seed, request.threads, fitter);
                const auto t1 = clock::now();
                out.hr = predict_hierarchical(hr, X_test, request.threads);
                const auto t2 = clock::now();
                out.timings.hr_fit_s = seconds(t0, t1);
                out.timings.hr_predict_s = seconds(t1, t2);
                out.hr_fallback_families = hr.fallback_families;
                out.hr_fallback_routed = count_fallback_routed(hr, out.hr);
                if (request.keep_models)
                    out.hr_model = std::make_shared<HierarchicalModel>(std::move(hr));
            }
            if (request.run_fl) {
                const auto t0 = clock::now();
                FlatModel fl = fit_flat(X_train, y_train, tree, request.spec, fold_seed,
                                        request.threads, fitter);
                const auto t1 = clock::now();
                out.fl = predict_flat(fl, X_test, request.threads);
                const auto t2 = clock::now();
                out.timings.fl_fit_s = seconds(t0, t1);
                out.timings.fl_predict_s = seconds(t1, t2);
                if (request.keep_models)
                    out.fl_model = std::make_shared<FlatModel>(std::move(fl));
            }
        } catch (const Error&) {
            std::throw_with_nested(
                PipelineError("experiment failed in fold " + std::to_string(fold)));
        }
    }
    return result;
}

// ---- serialization ----

namespace {

constexpr int kManifestVersion = 1;

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::ordered_json node_entry(const std::string& id, const NodePredictor& node,
                                  const std::string& file) {
    nlohmann::ordered_json entry;
    entry["id"] = id;
    if (node.is_constant()) {
        entry["kind"] = "constant";
        entry["constant"] = node.constant;
        entry["file"] = nullptr;
    } else {
        entry["kind"] = "trained";
        entry["classes"] = node.model->classes();
        entry["file"] = file;
    }
    return entry;
}

}  // namespace

nlohmann::ordered_json hierarchical_manifest(const HierarchicalModel& model) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kManifestVersion;
    doc["kind"] = "hierarchical_model";
    doc["taxonomy_version"] = model.taxonomy.version();
    doc["learner"] = model.spec.to_json();
    doc["fallback_families"] = model.fallback_families;
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    nodes.push_back(node_entry("c1", model.c1, "c1.json"));
    nodes.push_back(node_entry("c2", model.c2, "c2.json"));
    for (size_t i = 0; i < model.c3.size(); ++i) {
        auto entry = node_entry("c3/" + model.c3[i].first, model.c3[i].second,
                                "c3_" + std::to_string(i) + ".json");
        entry["family"] = model.c3[i].first;
        nodes.push_back(std::move(entry));
    }
    doc["nodes"] = std::move(nodes);
    return doc;
}

void save_hierarchical(const HierarchicalModel& model, const std::string& dir) {
    fs::create_directories(dir);
    write_text_file(fs::path(dir) / "taxonomy.json", serialize_taxonomy(model.taxonomy));
    write_text_file(fs::path(dir) / "manifest.json", hierarchical_manifest(model).dump(2) + "\n");
    if (!model.c1.is_constant())
        write_text_file(fs::path(dir) / "c1.json", model.c1.model->to_json().dump() + "\n");
    if (!model.c2.is_constant())
        write_text_file(fs::path(dir) / "c2.json", model.c2.model->to_json().dump() + "\n");
    for (size_t i = 0; i < model.c3.size(); ++i) {
        if (model.c3[i].second.is_constant()) continue;
        write_text_file(fs::path(dir) / ("c3_" + std::to_string(i) + ".json"),
                        model.c3[i].second.model->to_json().dump() + "\n");
    }
}

namespace {

NodePredictor load_node(const fs::path& dir, const nlohmann::ordered_json& entry) {
    if (entry.at("kind").get<std::string>() == "constant")
        return NodePredictor{nullptr, entry.at("constant").get<std::string>()};
    const auto file = entry.at("file").get<std::string>();
    const auto doc = nlohmann::ordered_json::parse(read_text_file(dir / file));
    return NodePredictor{Model::from_json(doc), ""};
}

}  // namespace

HierarchicalModel load_hierarchical(const std::string& dir) {
    const fs::path base(dir);
    HierarchicalModel model;
    model.taxonomy = load_taxonomy((base / "taxonomy.json").string());
    try {
        const auto manifest =
            nlohmann::ordered_json::parse(read_text_file(base / "manifest.json"));
        if (manifest.at("kind").get<std::string>() != "hierarchical_model")
            throw ValidationError("manifest at '" + dir + "' is not a hierarchical model bundle");
        model.spec = LearnerSpec::from_json(manifest.at("learner"));
        model.fallback_families =
            manifest.at("fallback_families").get<std::vector<std::string>>();
        for (const auto& entry : manifest.at("nodes")) {
            const auto id = entry.at("id").get<std::string>();
            if (id == "c1")
                model.c1 = load_node(base, entry);
            else if (id == "c2")
                model.c2 = load_node(base, entry);
            else
                model.c3.emplace_back(entry.at("family").get<std::string>(),
                                      load_node(base, entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model bundle at '" + dir + "': malformed document: " + e.what());
    }
    return model;
}

nlohmann::ordered_json flat_manifest(const FlatModel& model) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kManifestVersion;
    doc["kind"] = "flat_model";
    doc["taxonomy_version"] = model.taxonomy.version();
    doc["learner"] = model.spec.to_json();
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    nlohmann::ordered_json entry;
    entry["id"] = "flat";
    entry["kind"] = "trained";
    entry["classes"] = model.model->classes();
    entry["file"] = "flat.json";
    nodes.push_back(std::move(entry));
    doc["nodes"] = std::move(nodes);
    return doc;
}

void save_flat(const FlatModel& model, const std::string& dir) {
    fs::create_directories(dir);
    write_text_file(fs::path(dir) / "taxonomy.json", serialize_taxonomy(model.taxonomy));
    write_text_file(fs::path(dir) / "manifest.json", flat_manifest(model).dump(2) + "\n");
    write_text_file(fs::path(dir) / "flat.json", model.model->to_json().dump() + "\n");
}

FlatModel load_flat(const std::string& dir) {
    const fs::path base(dir);
    FlatModel model;
    model.taxonomy = load_taxonomy((base / "taxonomy.json").string());
    try {
        const auto manifest =
            nlohmann::ordered_json::parse(read_text_file(base / "manifest.json"));
        if (manifest.at("kind").get<std::string>() != "flat_model")
            throw ValidationError("manifest at '" + dir + "' is not a flat model bundle");
        model.spec = LearnerSpec::from_json(manifest.at("learner"));
        const auto doc = nlohmann::ordered_json::parse(read_text_file(base / "flat.json"));
        model.model = Model::from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model bundle at '" + dir + "': malformed document: " + e.what());
    }
    return model;
}

}  // namespace hicl
