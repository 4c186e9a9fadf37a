#pragma once

#include <string>

#include "hicl/evaluation.hpp"

namespace hicl {

/// Schema-versioned report document. Timing values live in a single
/// "timings" subtree so determinism checks can strip them.
nlohmann::ordered_json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::ordered_json& doc);
EvaluationReport load_report(const std::string& path);

nlohmann::ordered_json comparison_to_json(const Comparison& cmp);

/// Fixed-width table mirroring the report document, one row per
/// (level, metric) plus FN/FP totals.
std::string comparison_to_text(const Comparison& cmp);

/// CSV exports for a report: one metrics row per (model, level, fold) plus
/// mean and pooled rows.
std::string metrics_csv(const EvaluationReport& report);

/// One pooled confusion matrix per (model, level).
std::string confusion_csv(const ConfusionMatrix& cm);

std::string fn_csv(const FNReport& fn);
std::string fp_csv(const FPReport& fp);
std::string timings_csv(const EvaluationReport& report);

}  // namespace hicl
