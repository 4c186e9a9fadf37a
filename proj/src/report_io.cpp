#include "hicl/report_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "hicl/common.hpp"

namespace hicl {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kReportVersion = 1;

ordered_json metrics_to_json(const MetricSet& m) {
    return {{"accuracy", m.accuracy},
            {"precision", m.weighted_precision},
            {"recall", m.weighted_recall},
            {"f1", m.weighted_f1}};
}

MetricSet metrics_from_json(const ordered_json& doc) {
    MetricSet m;
    m.accuracy = doc.at("accuracy").get<double>();
    m.weighted_precision = doc.at("precision").get<double>();
    m.weighted_recall = doc.at("recall").get<double>();
    m.weighted_f1 = doc.at("f1").get<double>();
    return m;
}

ordered_json confusion_counts(const ConfusionMatrix& cm) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : cm.counts) rows.push_back(row);
    return rows;
}

ConfusionMatrix confusion_from_json(const std::vector<std::string>& labels,
                                    const ordered_json& counts) {
    ConfusionMatrix cm;
    cm.labels = labels;
    for (const auto& row : counts) cm.counts.push_back(row.get<std::vector<uint64_t>>());
    return cm;
}

}  // namespace

ordered_json report_to_json(const EvaluationReport& report) {
    ordered_json doc;
    doc["schema_version"] = kReportVersion;
    doc["kind"] = "evaluation_report";
    doc["model"] = report.model_id;
    doc["dataset"] = report.dataset;
    doc["schema"] = report.schema;
    doc["taxonomy"] = report.taxonomy;
    doc["taxonomy_version"] = report.taxonomy_version;
    doc["learner"] = report.learner.to_json();
    doc["k"] = report.k;
    doc["seed"] = report.seed;
    doc["fallback_families"] = report.fallback_families;
    doc["fallback_routed_rows"] = report.fallback_routed_rows;

    ordered_json levels;
    for (int level = 1; level <= 3; ++level) {
        const LevelEvaluation& le = report.levels[static_cast<size_t>(level - 1)];
        ordered_json entry;
        entry["labels"] = le.labels;
        ordered_json folds = ordered_json::array();
        for (const auto& m : le.fold_metrics) folds.push_back(metrics_to_json(m));
        entry["folds"] = std::move(folds);
        entry["mean"] = metrics_to_json(le.mean);
        entry["pooled"] = metrics_to_json(le.pooled_metrics);
        ordered_json fold_confusions = ordered_json::array();
        for (const auto& cm : le.fold_confusions) fold_confusions.push_back(confusion_counts(cm));
        entry["fold_confusions"] = std::move(fold_confusions);
        entry["pooled_confusion"] = confusion_counts(le.pooled);
        levels[std::to_string(level)] = std::move(entry);
    }
    doc["levels"] = std::move(levels);

    ordered_json fn;
    fn["total"] = report.fn.total;
    ordered_json fn_rows = ordered_json::object();
    for (size_t i = 0; i < report.fn.subtypes.size(); ++i) {
        fn_rows[report.fn.subtypes[i]] = {{"count", report.fn.counts[i]},
                                          {"support", report.fn.support[i]}};
    }
    fn["by_subtype"] = std::move(fn_rows);
    doc["false_negatives"] = std::move(fn);

    ordered_json fp;
    fp["total"] = report.fp.total;
    fp["benign_support"] = report.fp.benign_support;
    ordered_json fp_rows = ordered_json::object();
    for (size_t i = 0; i < report.fp.subtypes.size(); ++i)
        fp_rows[report.fp.subtypes[i]] = report.fp.counts[i];
    fp["by_predicted_subtype"] = std::move(fp_rows);
    doc["false_positives"] = std::move(fp);

    ordered_json timings;
    ordered_json fold_timings = ordered_json::array();
    double fit_total = 0.0, predict_total = 0.0;
    for (const auto& t : report.timings) {
        const double fit = report.model_id == "hr" ? t.hr_fit_s : t.fl_fit_s;
        const double predict = report.model_id == "hr" ? t.hr_predict_s : t.fl_predict_s;
        fold_timings.push_back({{"fit_s", fit}, {"predict_s", predict}});
        fit_total += fit;
        predict_total += predict;
    }
    timings["folds"] = std::move(fold_timings);
    timings["total_fit_s"] = fit_total;
    timings["total_predict_s"] = predict_total;
    doc["timings"] = std::move(timings);
    return doc;
}

namespace {

EvaluationReport report_from_json_impl(const ordered_json& doc) {
    EvaluationReport report;
    report.model_id = doc.at("model").get<std::string>();
    report.dataset = doc.at("dataset").get<std::string>();
    report.schema = doc.at("schema").get<std::string>();
    report.taxonomy = doc.at("taxonomy").get<std::string>();
    report.taxonomy_version = doc.at("taxonomy_version").get<std::string>();
    report.learner = LearnerSpec::from_json(doc.at("learner"));
    report.k = doc.at("k").get<int>();
    report.seed = doc.at("seed").get<uint64_t>();
    report.fallback_families = doc.at("fallback_families").get<std::vector<std::string>>();
    report.fallback_routed_rows = doc.at("fallback_routed_rows").get<uint64_t>();

    for (int level = 1; level <= 3; ++level) {
        const ordered_json& entry = doc.at("levels").at(std::to_string(level));
        LevelEvaluation& le = report.levels[static_cast<size_t>(level - 1)];
        le.labels = entry.at("labels").get<std::vector<std::string>>();
        for (const auto& m : entry.at("folds")) le.fold_metrics.push_back(metrics_from_json(m));
        le.mean = metrics_from_json(entry.at("mean"));
        le.pooled_metrics = metrics_from_json(entry.at("pooled"));
        for (const auto& cm : entry.at("fold_confusions"))
            le.fold_confusions.push_back(confusion_from_json(le.labels, cm));
        le.pooled = confusion_from_json(le.labels, entry.at("pooled_confusion"));
    }

    const ordered_json& fn = doc.at("false_negatives");
    report.fn.total = fn.at("total").get<uint64_t>();
    for (auto it = fn.at("by_subtype").begin(); it != fn.at("by_subtype").end(); ++it) {
        report.fn.subtypes.push_back(it.key());
        report.fn.counts.push_back(it.value().at("count").get<uint64_t>());
        report.fn.support.push_back(it.value().at("support").get<uint64_t>());
    }
    const ordered_json& fp = doc.at("false_positives");
    report.fp.total = fp.at("total").get<uint64_t>();
    report.fp.benign_support = fp.at("benign_support").get<uint64_t>();
    for (auto it = fp.at("by_predicted_subtype").begin(); it != fp.at("by_predicted_subtype").end();
         ++it) {
        report.fp.subtypes.push_back(it.key());
        report.fp.counts.push_back(it.value().get<uint64_t>());
    }
    for (const auto& t : doc.at("timings").at("folds")) {
        FoldTimings ft;
        if (report.model_id == "hr") {
            ft.hr_fit_s = t.at("fit_s").get<double>();
            ft.hr_predict_s = t.at("predict_s").get<double>();
        } else {
            ft.fl_fit_s = t.at("fit_s").get<double>();
            ft.fl_predict_s = t.at("predict_s").get<double>();
        }
        report.timings.push_back(ft);
    }
    return report;
}

}  // namespace

EvaluationReport report_from_json(const ordered_json& doc) {
    if (!doc.is_object() || doc.value("kind", "") != "evaluation_report")
        throw ParseError("report: not an evaluation_report document");
    try {
        return report_from_json_impl(doc);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: malformed document: ") + e.what());
    }
}

EvaluationReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open report file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ordered_json doc;
    try {
        doc = ordered_json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("report '" + path + "': malformed syntax: " + e.what());
    }
    return report_from_json(doc);
}

namespace {

const char* winner_name(int winner) {
    return winner > 0 ? "hr" : winner < 0 ? "fl" : "tie";
}

}  // namespace

ordered_json comparison_to_json(const Comparison& cmp) {
    ordered_json doc;
    doc["schema_version"] = kReportVersion;
    doc["kind"] = "comparison";
    doc["k"] = cmp.k;
    ordered_json levels;
    for (size_t level = 0; level < 3; ++level) {
        ordered_json entry;
        for (size_t m = 0; m < kMetricNames.size(); ++m) {
            const Comparison::Cell& cell = cmp.by_level[level][m];
            entry[kMetricNames[m]] = {{"hr", cell.hr},
                                      {"fl", cell.fl},
                                      {"delta", cell.delta},
                                      {"winner", winner_name(cell.winner)}};
        }
        levels[std::to_string(level + 1)] = std::move(entry);
    }
    doc["levels"] = std::move(levels);
    doc["false_negatives"] = {{"hr", static_cast<uint64_t>(cmp.fn_total.hr)},
                              {"fl", static_cast<uint64_t>(cmp.fn_total.fl)},
                              {"winner", winner_name(cmp.fn_total.winner)}};
    doc["false_positives"] = {{"hr", static_cast<uint64_t>(cmp.fp_total.hr)},
                              {"fl", static_cast<uint64_t>(cmp.fp_total.fl)},
                              {"winner", winner_name(cmp.fp_total.winner)}};
    return doc;
}

std::string comparison_to_text(const Comparison& cmp) {
    std::ostringstream out;
    out << "HR vs FL (fold means over k=" << cmp.k << ")\n";
    out << std::left << std::setw(8) << "level" << std::setw(12) << "metric" << std::right
        << std::setw(12) << "HR" << std::setw(12) << "FL" << std::setw(12) << "delta"
        << std::setw(8) << "winner" << '\n';
    out << std::string(64, '-') << '\n';
    out << std::setprecision(6) << std::fixed;
    for (size_t level = 0; level < 3; ++level) {
        for (size_t m = 0; m < kMetricNames.size(); ++m) {
            const Comparison::Cell& cell = cmp.by_level[level][m];
            out << std::left << std::setw(8) << (level + 1) << std::setw(12) << kMetricNames[m]
                << std::right << std::setw(12) << cell.hr << std::setw(12) << cell.fl
                << std::setw(12) << cell.delta << std::setw(8) << winner_name(cell.winner)
                << '\n';
        }
    }
    out << std::string(64, '-') << '\n';
    out << std::left << std::setw(20) << "false negatives" << std::right << std::setw(12)
        << static_cast<uint64_t>(cmp.fn_total.hr) << std::setw(12)
        << static_cast<uint64_t>(cmp.fn_total.fl) << std::setw(20)
        << winner_name(cmp.fn_total.winner) << '\n';
    out << std::left << std::setw(20) << "false positives" << std::right << std::setw(12)
        << static_cast<uint64_t>(cmp.fp_total.hr) << std::setw(12)
        << static_cast<uint64_t>(cmp.fp_total.fl) << std::setw(20)
        << winner_name(cmp.fp_total.winner) << '\n';
    return out.str();
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

void metrics_row(std::ostringstream& out, const std::string& model, int level,
                 const std::string& fold, const MetricSet& m) {
    out << model << ',' << level << ',' << fold << ',' << format_double(m.accuracy) << ','
        << format_double(m.weighted_precision) << ',' << format_double(m.weighted_recall) << ','
        << format_double(m.weighted_f1) << '\n';
}

}  // namespace

std::string metrics_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "model,level,fold,accuracy,weighted_precision,weighted_recall,weighted_f1\n";
    for (int level = 1; level <= 3; ++level) {
        const LevelEvaluation& le = report.levels[static_cast<size_t>(level - 1)];
        for (size_t f = 0; f < le.fold_metrics.size(); ++f)
            metrics_row(out, report.model_id, level, std::to_string(f), le.fold_metrics[f]);
        metrics_row(out, report.model_id, level, "mean", le.mean);
        metrics_row(out, report.model_id, level, "pooled", le.pooled_metrics);
    }
    return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "true\\pred";
    for (const auto& label : cm.labels) out << ',' << csv_quote(label);
    out << '\n';
    for (size_t i = 0; i < cm.labels.size(); ++i) {
        out << csv_quote(cm.labels[i]);
        for (size_t j = 0; j < cm.labels.size(); ++j) out << ',' << cm.counts[i][j];
        out << '\n';
    }
    return out.str();
}

std::string fn_csv(const FNReport& fn) {
    std::ostringstream out;
    out << "subtype,false_negatives,support\n";
    for (size_t i = 0; i < fn.subtypes.size(); ++i)
        out << csv_quote(fn.subtypes[i]) << ',' << fn.counts[i] << ',' << fn.support[i] << '\n';
    out << "TOTAL," << fn.total << ",\n";
    return out.str();
}

std::string fp_csv(const FPReport& fp) {
    std::ostringstream out;
    out << "predicted_subtype,false_positives\n";
    for (size_t i = 0; i < fp.subtypes.size(); ++i)
        out << csv_quote(fp.subtypes[i]) << ',' << fp.counts[i] << '\n';
    out << "TOTAL," << fp.total << '\n';
    out << "BENIGN_SUPPORT," << fp.benign_support << '\n';
    return out.str();
}

std::string timings_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "model,fold,fit_seconds,predict_seconds\n";
    for (size_t f = 0; f < report.timings.size(); ++f) {
        const auto& t = report.timings[f];
        const double fit = report.model_id == "hr" ? t.hr_fit_s : t.fl_fit_s;
        const double predict = report.model_id == "hr" ? t.hr_predict_s : t.fl_predict_s;
        out << report.model_id << ',' << f << ',' << format_double(fit) << ','
            << format_double(predict) << '\n';
    }
    return out.str();
}

}  // namespace hicl
