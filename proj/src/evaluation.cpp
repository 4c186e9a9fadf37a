#include "hicl/evaluation.hpp"

#include <algorithm>
#include <unordered_map>

#include "hicl/common.hpp"

namespace hicl {

uint64_t ConfusionMatrix::total() const {
    uint64_t n = 0;
    for (const auto& row : counts)
        for (uint64_t c : row) n += c;
    return n;
}

uint64_t ConfusionMatrix::trace() const {
    uint64_t n = 0;
    for (size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
    return n;
}

uint64_t ConfusionMatrix::at(const std::string& true_label,
                             const std::string& predicted_label) const {
    size_t ti = labels.size(), pi = labels.size();
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == true_label) ti = i;
        if (labels[i] == predicted_label) pi = i;
    }
    if (ti == labels.size() || pi == labels.size())
        throw ValidationError("confusion: unknown label");
    return counts[ti][pi];
}

ConfusionMatrix confusion(std::span<const std::string> y_true,
                          std::span<const std::string> y_pred,
                          std::vector<std::string> labels) {
    if (y_true.size() != y_pred.size())
        throw ValidationError("confusion: y_true and y_pred length mismatch");
    if (y_true.empty()) throw ValidationError("confusion: empty label vectors");
    ConfusionMatrix cm;
    cm.labels = std::move(labels);
    cm.counts.assign(cm.labels.size(), std::vector<uint64_t>(cm.labels.size(), 0));
    std::unordered_map<std::string_view, size_t> index;
    for (size_t i = 0; i < cm.labels.size(); ++i) index.emplace(cm.labels[i], i);
    for (size_t r = 0; r < y_true.size(); ++r) {
        auto ti = index.find(y_true[r]);
        auto pi = index.find(y_pred[r]);
        if (ti == index.end())
            throw ValidationError("confusion: true label '" + y_true[r] + "' outside label list");
        if (pi == index.end())
            throw ValidationError("confusion: predicted label '" + y_pred[r] +
                                  "' outside label list");
        ++cm.counts[ti->second][pi->second];
    }
    return cm;
}

void accumulate(ConfusionMatrix& into, const ConfusionMatrix& other) {
    if (into.labels != other.labels)
        throw ValidationError("confusion: label lists differ, cannot accumulate");
    for (size_t i = 0; i < into.counts.size(); ++i)
        for (size_t j = 0; j < into.counts.size(); ++j) into.counts[i][j] += other.counts[i][j];
}

MetricSet weighted_metrics(const ConfusionMatrix& cm) {
    const size_t m = cm.labels.size();
    const auto total = static_cast<double>(cm.total());
    if (!(total > 0)) throw ValidationError("weighted_metrics: empty confusion matrix");
    std::vector<uint64_t> row_sum(m, 0), col_sum(m, 0);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            row_sum[i] += cm.counts[i][j];
            col_sum[j] += cm.counts[i][j];
        }
    }
    MetricSet out;
    // accumulate support * metric and divide once, so a perfect matrix
    // yields exactly 1.0
    for (size_t i = 0; i < m; ++i) {
        const auto tp = static_cast<double>(cm.counts[i][i]);
        const auto support = static_cast<double>(row_sum[i]);
        const auto predicted = static_cast<double>(col_sum[i]);
        const double precision = predicted > 0 ? tp / predicted : 0.0;
        const double recall = support > 0 ? tp / support : 0.0;
        const double f1 =
            precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        out.weighted_precision += support * precision;
        out.weighted_recall += support * recall;
        out.weighted_f1 += support * f1;
    }
    out.weighted_precision /= total;
    out.weighted_recall /= total;
    out.weighted_f1 /= total;
    out.accuracy = static_cast<double>(cm.trace()) / total;
    return out;
}

std::vector<std::string> level_labels(const TaxonomyTree& tree, int level) {
    std::vector<std::string> labels;
    if (level == 1) {
        labels = {kBenignClass, kAttackClass};
    } else if (level == 2) {
        labels.push_back(tree.benign_label());
        for (const auto& fam : tree.families()) labels.push_back(fam.label);
    } else {
        labels.push_back(tree.benign_label());
        for (const auto& fam : tree.families())
            for (const auto& sub : fam.subtypes) labels.push_back(sub);
    }
    return labels;
}

FNReport false_negatives(const LabelFrame& truth, std::span<const PredictionTriple> preds,
                         const TaxonomyTree& tree) {
    if (truth.size() != preds.size())
        throw ValidationError("false_negatives: truth and predictions length mismatch");
    FNReport report;
    std::unordered_map<std::string_view, size_t> index;
    for (const auto& fam : tree.families()) {
        for (const auto& sub : fam.subtypes) {
            index.emplace(sub, report.subtypes.size());
            report.subtypes.push_back(sub);
        }
    }
    report.counts.assign(report.subtypes.size(), 0);
    report.support.assign(report.subtypes.size(), 0);
    for (size_t r = 0; r < truth.size(); ++r) {
        if (truth.level1[r] != Level1::attack) continue;
        const size_t slot = index.at(truth.level3[r]);
        ++report.support[slot];
        if (preds[r].level1 == Level1::benign) {
            ++report.counts[slot];
            ++report.total;
        }
    }
    return report;
}

FPReport false_positives(const LabelFrame& truth, std::span<const PredictionTriple> preds,
                         const TaxonomyTree& tree) {
    if (truth.size() != preds.size())
        throw ValidationError("false_positives: truth and predictions length mismatch");
    FPReport report;
    std::unordered_map<std::string_view, size_t> index;
    for (const auto& fam : tree.families()) {
        for (const auto& sub : fam.subtypes) {
            index.emplace(sub, report.subtypes.size());
            report.subtypes.push_back(sub);
        }
    }
    report.counts.assign(report.subtypes.size(), 0);
    for (size_t r = 0; r < truth.size(); ++r) {
        if (truth.level1[r] != Level1::benign) continue;
        ++report.benign_support;
        if (preds[r].level1 == Level1::attack) {
            ++report.counts[index.at(preds[r].level3)];
            ++report.total;
        }
    }
    return report;
}

namespace {

std::vector<std::string> triple_level(std::span<const PredictionTriple> preds, int level) {
    std::vector<std::string> out;
    out.reserve(preds.size());
    for (const auto& p : preds) {
        if (level == 1)
            out.push_back(level1_class(p.level1));
        else if (level == 2)
            out.push_back(p.level2);
        else
            out.push_back(p.level3);
    }
    return out;
}

std::vector<std::string> truth_level(const LabelFrame& truth, int level) {
    if (level == 2) return truth.level2;
    if (level == 3) return truth.level3;
    std::vector<std::string> out;
    out.reserve(truth.size());
    for (Level1 v : truth.level1) out.push_back(level1_class(v));
    return out;
}

}  // namespace

EvaluationReport evaluate_model(const std::string& model_id, const ExperimentResult& result,
                                const TaxonomyTree& tree) {
    EvaluationReport report;
    report.model_id = model_id;
    report.k = result.plan.k;
    report.seed = result.plan.seed;
    report.taxonomy_version = tree.version();

    const bool use_hr = model_id == "hr";
    if (!use_hr && model_id != "fl")
        throw ValidationError("evaluate_model: model id must be 'hr' or 'fl'");

    // pooled truth/pred streams for the FN/FP reports
    LabelFrame all_truth;
    std::vector<PredictionTriple> all_preds;

    for (int level = 1; level <= 3; ++level) {
        LevelEvaluation& le = report.levels[static_cast<size_t>(level - 1)];
        le.labels = level_labels(tree, level);
        le.pooled.labels = le.labels;
        le.pooled.counts.assign(le.labels.size(), std::vector<uint64_t>(le.labels.size(), 0));
    }

    for (const FoldResult& fold : result.folds) {
        const std::vector<PredictionTriple>& preds = use_hr ? fold.hr : fold.fl;
        if (preds.size() != fold.truth.size())
            throw ValidationError("evaluate_model: model '" + model_id +
                                  "' was not run in fold " + std::to_string(fold.fold));
        for (int level = 1; level <= 3; ++level) {
            LevelEvaluation& le = report.levels[static_cast<size_t>(level - 1)];
            ConfusionMatrix cm =
                confusion(truth_level(fold.truth, level), triple_level(preds, level), le.labels);
            le.fold_metrics.push_back(weighted_metrics(cm));
            accumulate(le.pooled, cm);
            le.fold_confusions.push_back(std::move(cm));
        }
        for (size_t i = 0; i < fold.truth.size(); ++i) {
            all_truth.level1.push_back(fold.truth.level1[i]);
            all_truth.level2.push_back(fold.truth.level2[i]);
            all_truth.level3.push_back(fold.truth.level3[i]);
        }
        all_preds.insert(all_preds.end(), preds.begin(), preds.end());
        report.timings.push_back(fold.timings);
        if (use_hr) {
            report.fallback_routed_rows += fold.hr_fallback_routed;
            for (const auto& fam : fold.hr_fallback_families) {
                if (std::find(report.fallback_families.begin(), report.fallback_families.end(),
                              fam) == report.fallback_families.end())
                    report.fallback_families.push_back(fam);
            }
        }
    }

    const auto folds = static_cast<double>(result.folds.size());
    for (auto& le : report.levels) {
        for (const MetricSet& m : le.fold_metrics) {
            le.mean.accuracy += m.accuracy;
            le.mean.weighted_precision += m.weighted_precision;
            le.mean.weighted_recall += m.weighted_recall;
            le.mean.weighted_f1 += m.weighted_f1;
        }
        le.mean.accuracy /= folds;
        le.mean.weighted_precision /= folds;
        le.mean.weighted_recall /= folds;
        le.mean.weighted_f1 /= folds;
        le.pooled_metrics = weighted_metrics(le.pooled);
    }
    report.fn = false_negatives(all_truth, all_preds, tree);
    report.fp = false_positives(all_truth, all_preds, tree);
    return report;
}

namespace {

Comparison::Cell metric_cell(double hr, double fl, bool higher_wins) {
    Comparison::Cell cell;
    cell.hr = hr;
    cell.fl = fl;
    cell.delta = hr - fl;
    if (hr == fl)
        cell.winner = 0;
    else if ((hr > fl) == higher_wins)
        cell.winner = 1;
    else
        cell.winner = -1;
    return cell;
}

}  // namespace

Comparison compare(const EvaluationReport& hr, const EvaluationReport& fl) {
    if (hr.k != fl.k || hr.levels[0].fold_metrics.size() != fl.levels[0].fold_metrics.size())
        throw ValidationError("compare: fold structure mismatch");
    Comparison cmp;
    cmp.k = hr.k;
    for (size_t level = 0; level < 3; ++level) {
        const MetricSet& a = hr.levels[level].mean;
        const MetricSet& b = fl.levels[level].mean;
        cmp.by_level[level][0] = metric_cell(a.accuracy, b.accuracy, true);
        cmp.by_level[level][1] = metric_cell(a.weighted_precision, b.weighted_precision, true);
        cmp.by_level[level][2] = metric_cell(a.weighted_recall, b.weighted_recall, true);
        cmp.by_level[level][3] = metric_cell(a.weighted_f1, b.weighted_f1, true);
    }
    cmp.fn_total = metric_cell(static_cast<double>(hr.fn.total), static_cast<double>(fl.fn.total),
                               false);
    cmp.fp_total = metric_cell(static_cast<double>(hr.fp.total), static_cast<double>(fl.fp.total),
                               false);
    return cmp;
}

}  // namespace hicl
