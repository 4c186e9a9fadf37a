#pragma once

#include <array>
#include <string>
#include <vector>

#include "hicl/models.hpp"

namespace hicl {

/// Rows are true labels, columns predicted labels, in the fixed `labels`
/// order.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<uint64_t>> counts;

    uint64_t total() const;
    uint64_t trace() const;
    uint64_t at(const std::string& true_label, const std::string& predicted_label) const;
};

ConfusionMatrix confusion(std::span<const std::string> y_true,
                          std::span<const std::string> y_pred,
                          std::vector<std::string> labels);

/// Adds `other` into `into`; label lists must match.
void accumulate(ConfusionMatrix& into, const ConfusionMatrix& other);

struct MetricSet {
    double accuracy = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
};

/// Support-weighted precision/recall/F1 and accuracy. Per-class metrics with
/// a zero denominator contribute 0.
MetricSet weighted_metrics(const ConfusionMatrix& cm);

/// Attack rows predicted benign at level 1, bucketed by true subtype.
struct FNReport {
    std::vector<std::string> subtypes;   // taxonomy order
    std::vector<uint64_t> counts;        // aligned with subtypes
    std::vector<uint64_t> support;       // attack rows per subtype
    uint64_t total = 0;
};

FNReport false_negatives(const LabelFrame& truth, std::span<const PredictionTriple> preds,
                         const TaxonomyTree& tree);

/// Benign rows predicted as attacks, bucketed by predicted subtype.
struct FPReport {
    std::vector<std::string> subtypes;   // taxonomy order
    std::vector<uint64_t> counts;
    uint64_t total = 0;
    uint64_t benign_support = 0;
};

FPReport false_positives(const LabelFrame& truth, std::span<const PredictionTriple> preds,
                         const TaxonomyTree& tree);

struct LevelEvaluation {
    std::vector<std::string> labels;
    std::vector<MetricSet> fold_metrics;
    std::vector<ConfusionMatrix> fold_confusions;
    MetricSet mean;                 // arithmetic mean over folds
    ConfusionMatrix pooled;         // fold confusions summed
    MetricSet pooled_metrics;       // derived from the pooled confusion
};

struct EvaluationReport {
    std::string model_id;  // "hr" | "fl"
    std::string dataset;
    std::string schema;
    std::string taxonomy;
    std::string taxonomy_version;
    LearnerSpec learner;
    int k = 0;
    uint64_t seed = 0;
    std::array<LevelEvaluation, 3> levels;  // level 1, 2, 3
    FNReport fn;  // pooled over the fold test splits
    FPReport fp;
    std::vector<std::string> fallback_families;  // union over folds
    uint64_t fallback_routed_rows = 0;
    std::vector<FoldTimings> timings;  // per fold; hr or fl slots as run
};

/// Builds the report for one model ("hr" or "fl") of an experiment.
EvaluationReport evaluate_model(const std::string& model_id, const ExperimentResult& result,
                                const TaxonomyTree& tree);

/// Fixed label orders used for all confusion matrices of a taxonomy.
std::vector<std::string> level_labels(const TaxonomyTree& tree, int level);

/// Per-level, per-metric side-by-side values with winner flags. Metrics win
/// high; FN/FP totals win low.
struct Comparison {
    struct Cell {
        double hr = 0.0;
        double fl = 0.0;
        double delta = 0.0;  // hr - fl
        int winner = 0;      // +1 hr, -1 fl, 0 tie
    };
    int k = 0;
    std::array<std::array<Cell, 4>, 3> by_level;  // [level][accuracy, precision, recall, f1]
    Cell fn_total;
    Cell fp_total;
};

inline constexpr std::array<const char*, 4> kMetricNames = {"accuracy", "precision", "recall",
                                                            "f1"};

/// Requires matching fold structure; values compared are fold means.
Comparison compare(const EvaluationReport& hr, const EvaluationReport& fl);

}  // namespace hicl
