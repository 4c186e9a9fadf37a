#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hicl/dataset.hpp"
#include "hicl/encoding.hpp"
#include "hicl/folds.hpp"
#include "hicl/learners.hpp"

namespace hicl {

/// One prediction routed through the hierarchy: benign rows resolve to
/// (benign, benign_label, benign_label), attacks to (attack, family, subtype).
struct PredictionTriple {
    Level1 level1 = Level1::benign;
    std::string level2;
    std::string level3;

    bool operator==(const PredictionTriple&) const = default;
};

/// A trained classifier or, for one-class training sets, a constant label.
struct NodePredictor {
    ModelPtr model;        // null when constant
    std::string constant;  // used when model is null

    bool is_constant() const { return model == nullptr; }
    std::vector<std::string> predict(const FeatureMatrix& X, int threads) const;
};

/// Local-classifier-per-node hierarchy: binary root, one family classifier
/// over attack rows, and one subtype classifier per family.
struct HierarchicalModel {
    TaxonomyTree taxonomy;
    LearnerSpec spec;
    NodePredictor c1;                      // {benign, attack}
    NodePredictor c2;                      // family labels
    std::vector<std::pair<std::string, NodePredictor>> c3;  // per family, taxonomy order
    std::vector<std::string> fallback_families;  // families absent from training data

    const NodePredictor& family_node(const std::string& family) const;
};

struct FlatModel {
    TaxonomyTree taxonomy;
    LearnerSpec spec;
    ModelPtr model;  // classes within {benign} + subtypes
};

using Fitter = std::function<ModelPtr(const LearnerSpec&, const FeatureMatrix&,
                                      std::span<const std::string>, uint64_t, int)>;

/// The standard dispatch through fit_model.
const Fitter& default_fitter();

/// Trains the hierarchy on the given matrix/labels (all rows are training
/// rows). Node seeds derive from (seed, node path); see run_cv_experiment
/// for the per-fold chain. Requires at least one benign and one attack row.
HierarchicalModel fit_hierarchical(const FeatureMatrix& X, const LabelFrame& labels,
                                   const TaxonomyTree& tree, const LearnerSpec& spec,
                                   uint64_t seed, int threads = 1,
                                   const Fitter& fitter = default_fitter());

/// Top-down routing: c1 first; benign rows never reach c2/c3.
std::vector<PredictionTriple> predict_hierarchical(const HierarchicalModel& model,
                                                   const FeatureMatrix& X, int threads = 1);

FlatModel fit_flat(const FeatureMatrix& X, const LabelFrame& labels, const TaxonomyTree& tree,
                   const LearnerSpec& spec, uint64_t seed, int threads = 1,
                   const Fitter& fitter = default_fitter());

/// Flat leaf predictions lifted to all three levels via leaf_path.
std::vector<PredictionTriple> predict_flat(const FlatModel& model, const FeatureMatrix& X,
                                           int threads = 1);

/// Number of trained (non-constant) classifiers in the hierarchy.
size_t trained_classifier_count(const HierarchicalModel& model);

/// Rows routed through a family whose subtype node was an untrained
/// fallback (family missing from training data).
size_t count_fallback_routed(const HierarchicalModel& model,
                             std::span<const PredictionTriple> preds);

struct ExperimentRequest {
    LearnerSpec spec;
    int k = 10;
    uint64_t seed = 0;
    bool run_hr = true;
    bool run_fl = true;
    int threads = 1;
    bool keep_models = false;  // retain fitted models in the fold results
};

struct FoldTimings {
    double hr_fit_s = 0.0;
    double hr_predict_s = 0.0;
    double fl_fit_s = 0.0;
    double fl_predict_s = 0.0;
};

struct FoldResult {
    int fold = 0;
    std::vector<size_t> test_rows;
    LabelFrame truth;  // aligned with test_rows
    std::vector<PredictionTriple> hr;  // empty when HR not run
    std::vector<PredictionTriple> fl;  // empty when FL not run
    FoldTimings timings;
    std::vector<std::string> hr_fallback_families;
    size_t hr_fallback_routed = 0;
    std::shared_ptr<const HierarchicalModel> hr_model;  // only with keep_models
    std::shared_ptr<const FlatModel> fl_model;
};

struct ExperimentResult {
    FoldPlan plan;
    std::vector<FoldResult> folds;
};

/// Stratified cross-validation over both models. Per fold: the encoder is
/// fitted on the training split only, both models consume the same encoded
/// matrices, and every node seed derives from
/// (master seed, fold index, model id, node id) so results are independent
/// of thread count and execution order.
ExperimentResult run_cv_experiment(const DataTable& table, const TaxonomyTree& tree,
                                   const ExperimentRequest& request,
                                   const Fitter& fitter = default_fitter());

// ---- model bundle serialization ----

nlohmann::ordered_json hierarchical_manifest(const HierarchicalModel& model);

/// Writes manifest.json plus one JSON file per trained node into `dir`.
void save_hierarchical(const HierarchicalModel& model, const std::string& dir);
HierarchicalModel load_hierarchical(const std::string& dir);

nlohmann::ordered_json flat_manifest(const FlatModel& model);
void save_flat(const FlatModel& model, const std::string& dir);
FlatModel load_flat(const std::string& dir);

}  // namespace hicl
