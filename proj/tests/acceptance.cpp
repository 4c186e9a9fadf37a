// Acceptance suite: runs every acceptance criterion and prints one
// PASS/FAIL line each. Exits non-zero if any mandatory criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "hicl/evaluation.hpp"
#include "hicl/folds.hpp"
#include "hicl/report_io.hpp"

using namespace hicl;
namespace fs = std::filesystem;

namespace {

struct Harness {
    int failures = 0;
    int skipped = 0;

    void criterion(const std::string& name, const std::function<void()>& body) {
        try {
            body();
            std::cout << "PASS  " << name << '\n';
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL  " << name << "\n      " << e.what() << '\n';
        }
    }

    void skip(const std::string& name, const std::string& why) {
        ++skipped;
        std::cout << "SKIP  " << name << " (" << why << ")\n";
    }
};

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

int acceptance_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 2;
}

// ---- criterion bodies ----

void routing_consistency() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(2024);
    LearnerSpec spec;
    spec.algorithm = Algorithm::dt;
    size_t rows_checked = 0;
    for (int t = 0; t < 20; ++t) {
        const TaxonomyTree tree = testutil::random_tree(rng);
        auto train = testutil::synth_xy(tree, 10, 4, 1.0, 1.5, 0.3, 100 + t);
        // at least 50 probe rows per taxonomy: 1000+ triples over 20 trees
        const size_t probe_per_leaf = (50 + tree.leaf_count() - 1) / tree.leaf_count();
        auto probe = testutil::synth_xy(tree, probe_per_leaf, 4, 1.0, 3.0, 0.3, 900 + t);
        const HierarchicalModel model = fit_hierarchical(train.X, train.labels, tree, spec, t);
        const auto preds = predict_hierarchical(model, probe.X);
        for (const auto& p : preds) {
            ++rows_checked;
            const LeafPath path = leaf_path(tree, p.level3);
            require(path.level1 == p.level1 && path.level2 == p.level2,
                    "prediction triple inconsistent with leaf_path");
            if (p.level1 == Level1::attack) {
                const FamilyNode* fam = tree.find_family(p.level2);
                require(fam != nullptr, "predicted family missing from taxonomy");
                require(std::find(fam->subtypes.begin(), fam->subtypes.end(), p.level3) !=
                            fam->subtypes.end(),
                        "predicted (family, subtype) edge missing from taxonomy");
            } else {
                require(p.level2 == tree.benign_label() && p.level3 == tree.benign_label(),
                        "benign triple must collapse to the benign label");
            }
        }
    }
    require(rows_checked >= 1000, "expected at least 1000 synthetic rows, got " +
                                      std::to_string(rows_checked));
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require(elapsed < 10.0, "routing suite took " + std::to_string(elapsed) + "s (limit 10s)");
}

void metric_oracle_equivalence() {
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const TaxonomyTree tree = testutil::random_tree(rng);
        std::vector<std::string> pool{tree.benign_label()};
        for (const auto& fam : tree.families())
            pool.insert(pool.end(), fam.subtypes.begin(), fam.subtypes.end());
        const size_t n = 1 + rng.bounded(400);
        LabelFrame truth;
        std::vector<PredictionTriple> preds;
        std::vector<std::string> y_true, y_pred;
        for (size_t i = 0; i < n; ++i) {
            const LeafPath t = leaf_path(tree, pool[rng.bounded(pool.size())]);
            const LeafPath p = leaf_path(tree, pool[rng.bounded(pool.size())]);
            truth.level1.push_back(t.level1);
            truth.level2.push_back(t.level2);
            truth.level3.push_back(t.level3);
            preds.push_back({p.level1, p.level2, p.level3});
            y_true.push_back(t.level3);
            y_pred.push_back(p.level3);
        }
        // implementation metrics
        const ConfusionMatrix cm = confusion(y_true, y_pred, level_labels(tree, 3));
        const MetricSet m = weighted_metrics(cm);
        // independent brute force from the raw pairs
        std::set<std::string> classes(y_true.begin(), y_true.end());
        classes.insert(y_pred.begin(), y_pred.end());
        double acc = 0, prec = 0, rec = 0, f1 = 0;
        for (size_t i = 0; i < n; ++i) acc += y_true[i] == y_pred[i];
        acc /= static_cast<double>(n);
        for (const auto& cls : classes) {
            size_t tp = 0, fp = 0, fn = 0;
            for (size_t i = 0; i < n; ++i) {
                tp += y_true[i] == cls && y_pred[i] == cls;
                fp += y_true[i] != cls && y_pred[i] == cls;
                fn += y_true[i] == cls && y_pred[i] != cls;
            }
            const double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
            const double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
            const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
            const double w = double(tp + fn) / double(n);
            prec += w * p;
            rec += w * r;
            f1 += w * f;
        }
        require(std::abs(m.accuracy - acc) <= 1e-12, "accuracy mismatch");
        require(std::abs(m.weighted_precision - prec) <= 1e-12, "precision mismatch");
        require(std::abs(m.weighted_recall - rec) <= 1e-12, "recall mismatch");
        require(std::abs(m.weighted_f1 - f1) <= 1e-12, "f1 mismatch");

        // FN/FP totals equal the level-1 confusion entries
        std::vector<std::string> t1, p1;
        for (size_t i = 0; i < n; ++i) {
            t1.push_back(level1_class(truth.level1[i]));
            p1.push_back(level1_class(preds[i].level1));
        }
        const ConfusionMatrix cm1 = confusion(t1, p1, level_labels(tree, 1));
        require(false_negatives(truth, preds, tree).total ==
                    cm1.at(kAttackClass, kBenignClass),
                "FN total != level-1 confusion entry");
        require(false_positives(truth, preds, tree).total ==
                    cm1.at(kBenignClass, kAttackClass),
                "FP total != level-1 confusion entry");
    }
}

void stratification_bound() {
    Rng rng(31337);
    const int k = 10;
    for (int trial = 0; trial < 25; ++trial) {
        const size_t n = static_cast<size_t>(k) + rng.bounded(5000 - k);
        const size_t n_classes = 1 + rng.bounded(10);
        std::vector<std::string> labels;
        for (size_t i = 0; i < n; ++i)
            labels.push_back("c" + std::to_string(rng.bounded(n_classes)));
        const FoldPlan plan = stratified_kfold(labels, k, trial * 7 + 1);

        std::map<std::string, std::vector<double>> per_fold;
        std::map<std::string, size_t> class_count;
        for (size_t i = 0; i < n; ++i) {
            auto& counts = per_fold[labels[i]];
            counts.resize(k, 0);
            counts[static_cast<size_t>(plan.assignments[i])] += 1;
            ++class_count[labels[i]];
        }
        for (const auto& [cls, counts] : per_fold) {
            const size_t nc = class_count[cls];
            if (nc >= static_cast<size_t>(k)) {
                const double proportional = static_cast<double>(nc) / k;
                for (double c : counts)
                    require(std::abs(c - proportional) <= 1.0,
                            "class " + cls + " deviates from proportional allocation");
            } else {
                std::set<int> folds;
                for (size_t i = 0; i < n; ++i)
                    if (labels[i] == cls) folds.insert(plan.assignments[i]);
                require(folds.size() == nc, "small class " + cls + " shares a fold");
            }
        }
    }
}

void learner_sanity() {
    Rng rng(4242);
    LearnerSpec dt_spec;
    dt_spec.algorithm = Algorithm::dt;
    for (int trial = 0; trial < 100; ++trial) {
        const size_t n = 5 + rng.bounded(120);
        const size_t d = 1 + rng.bounded(4);
        FeatureMatrix X = testutil::matrix(n, d, std::vector<double>(n * d, 0.0));
        std::vector<std::string> y;
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < d; ++c)
                X.at(r, c) = static_cast<double>(rng.bounded(6));
            y.push_back("c" + std::to_string(hash_string(testutil::row_key(X.row(r))) % 4));
        }
        require(fit_model(dt_spec, X, y, 0)->predict(X) == y,
                "unconstrained dt failed to memorize consistent data");

        // distinct rows for 1-nn
        FeatureMatrix Xd = testutil::matrix(n, 2, std::vector<double>(n * 2, 0.0));
        std::set<std::string> seen;
        std::vector<std::string> yd;
        for (size_t r = 0; r < n; ++r) {
            do {
                Xd.at(r, 0) = static_cast<double>(rng.bounded(100000));
                Xd.at(r, 1) = static_cast<double>(rng.bounded(100000));
            } while (!seen.insert(testutil::row_key(Xd.row(r))).second);
            yd.push_back("c" + std::to_string(rng.bounded(3)));
        }
        require(knn_predict(Xd, yd, Xd, 1) == yd, "1-nn failed on distinct rows");
    }

    // gnb / lr on 10-sigma blobs, held-out accuracy
    for (Algorithm algorithm : {Algorithm::gnb, Algorithm::lr}) {
        auto train = testutil::make_blobs(200, 3, 10.0, 1.0, rng);
        auto test = testutil::make_blobs(200, 3, 10.0, 1.0, rng);
        LearnerSpec spec;
        spec.algorithm = algorithm;
        const ModelPtr model = fit_model(spec, train.X, train.y, 1);
        const auto pred = model->predict(test.X);
        size_t hits = 0;
        for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == test.y[i];
        const double accuracy = double(hits) / double(pred.size());
        require(accuracy >= 0.99, std::string(algorithm_name(algorithm)) +
                                      " test accuracy " + std::to_string(accuracy) + " < 0.99");
    }

    // analytic lr gradient vs central finite differences
    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 5 + rng.bounded(46);
        const size_t d = 1 + rng.bounded(5);
        const int n_classes = 2 + static_cast<int>(rng.bounded(3));
        FeatureMatrix X = testutil::matrix(n, d, std::vector<double>(n * d, 0.0));
        std::vector<int> y(n);
        for (size_t r = 0; r < n; ++r) {
            for (size_t c = 0; c < d; ++c) X.at(r, c) = rng.uniform(-2, 2);
            y[r] = static_cast<int>(rng.bounded(static_cast<size_t>(n_classes)));
        }
        std::vector<double> W(static_cast<size_t>(n_classes) * d), b(
                                                                       static_cast<size_t>(n_classes));
        for (auto& w : W) w = rng.uniform(-1, 1);
        for (auto& v : b) v = rng.uniform(-1, 1);
        std::vector<double> gW(W.size()), gb(b.size());
        const double l2 = 1e-3;
        lr_gradient(X, y, n_classes, W, b, l2, gW, gb);
        const double h = 1e-6;
        auto check = [&](std::vector<double>& params, size_t i, double analytic) {
            const double saved = params[i];
            params[i] = saved + h;
            const double up = lr_loss(X, y, n_classes, W, b, l2);
            params[i] = saved - h;
            const double down = lr_loss(X, y, n_classes, W, b, l2);
            params[i] = saved;
            const double fd = (up - down) / (2 * h);
            const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-8});
            require(std::abs(fd - analytic) / scale <= 1e-5, "lr gradient mismatch vs FD");
        };
        for (size_t i = 0; i < W.size(); ++i) check(W, i, gW[i]);
        for (size_t i = 0; i < b.size(); ++i) check(b, i, gb[i]);
    }
}

void oracle_end_to_end() {
    const TaxonomyTree tree("normal", {{"DoS", {"smurf", "neptune"}},
                                       {"Probe", {"satan", "nmap"}},
                                       {"R2L", {"phf", "imap"}}});
    auto data = testutil::synth_xy(tree, 25, 4, 1.0, 1.0, 0.3, 9001);
    LearnerSpec spec;
    spec.algorithm = Algorithm::dt;
    const Fitter oracle = testutil::memorizing_fitter();

    // test == train: single synthetic fold evaluated on its training rows
    ExperimentResult result;
    result.plan.k = 1;
    result.plan.seed = 0;
    FoldResult fold;
    fold.fold = 0;
    fold.truth = data.labels;
    const HierarchicalModel hr = fit_hierarchical(data.X, data.labels, tree, spec, 0, 1, oracle);
    const FlatModel fl = fit_flat(data.X, data.labels, tree, spec, 0, 1, oracle);
    fold.hr = predict_hierarchical(hr, data.X);
    fold.fl = predict_flat(fl, data.X);
    result.folds.push_back(std::move(fold));

    const EvaluationReport hr_report = evaluate_model("hr", result, tree);
    const EvaluationReport fl_report = evaluate_model("fl", result, tree);
    for (const auto* report : {&hr_report, &fl_report}) {
        for (const auto& le : report->levels) {
            require(le.mean.accuracy == 1.0 && le.mean.weighted_precision == 1.0 &&
                        le.mean.weighted_recall == 1.0 && le.mean.weighted_f1 == 1.0,
                    "oracle metrics below 1.0 at some level");
        }
        require(report->fn.total == 0, "oracle run produced false negatives");
        require(report->fp.total == 0, "oracle run produced false positives");
    }
    auto hr_doc = report_to_json(hr_report);
    auto fl_doc = report_to_json(fl_report);
    for (auto* doc : {&hr_doc, &fl_doc}) {
        doc->erase("timings");
        doc->erase("model");
        doc->erase("fallback_families");
        doc->erase("fallback_routed_rows");
    }
    require(hr_doc == fl_doc, "HR and FL oracle reports differ");
}

void determinism_cli() {
    testutil::TempDir tmp("acceptance_determinism");
    auto shell = [&](const std::string& args) {
        const std::string cmd = std::string(HICL_BIN_PATH) + " " + args + " >" +
                                tmp.file("log.txt") + " 2>&1";
        const int status = std::system(cmd.c_str());
        require(status != -1 && WEXITSTATUS(status) == 0,
                "cli invocation failed: " + args);
    };
    const std::string taxonomy =
        (fs::path(HICL_DATA_DIR) / "taxonomies" / "iscx_url2016.json").string();
    shell("synth --taxonomy " + taxonomy +
          " --per-leaf 30 --dim 4 --separation 1.2 --sigma 1 --benign-fraction 0.4"
          " --seed 12 -o " + tmp.file("data"));
    testutil::write_file(tmp.file("config.json"), R"({
      "dataset": ")" + tmp.file("data/data.csv") + R"(",
      "schema": ")" + tmp.file("data/schema.json") + R"(",
      "taxonomy": ")" + tmp.file("data/taxonomy.json") + R"(",
      "learner": {"algorithm": "rf", "trees": 12},
      "k": 3, "seed": 2717, "models": "both", "save_models": false,
      "output_dir": ")" + tmp.file("out1") + R"("})");
    shell("run --config " + tmp.file("config.json") + " --threads 1");
    shell("run --config " + tmp.file("config.json") + " --threads 8 --output-dir " +
          tmp.file("out2"));

    for (const char* name : {"report_hr.json", "report_fl.json"}) {
        auto a = nlohmann::ordered_json::parse(testutil::read_file(tmp.file("out1/") + name));
        auto b = nlohmann::ordered_json::parse(testutil::read_file(tmp.file("out2/") + name));
        a.erase("timings");
        b.erase("timings");
        require(a == b, std::string(name) + " differs across thread budgets");
    }
    for (const char* name : {"metrics.csv", "comparison.json", "comparison.txt",
                             "confusion_hr_level1.csv", "confusion_hr_level2.csv",
                             "confusion_hr_level3.csv", "confusion_fl_level3.csv",
                             "fn_hr.csv", "fn_fl.csv", "fp_hr.csv", "fp_fl.csv"}) {
        require(testutil::read_file(tmp.file("out1/") + name) ==
                    testutil::read_file(tmp.file("out2/") + name),
                std::string(name) + " differs across thread budgets");
    }
}

void synthetic_hr_vs_fl() {
    std::vector<FamilyNode> families;
    for (int f = 0; f < 6; ++f) {
        FamilyNode fam;
        fam.label = "family" + std::to_string(f);
        for (int s = 0; s < 3; ++s)
            fam.subtypes.push_back("type" + std::to_string(f) + "_" + std::to_string(s));
        families.push_back(std::move(fam));
    }
    const TaxonomyTree tree("normal", std::move(families));

    SyntheticSpec sspec;
    sspec.taxonomy = tree;
    sspec.per_leaf = 200;
    sspec.dim = 6;
    sspec.separation = 0.4;  // moderate overlap between sibling subtypes
    sspec.sigma = 1.0;
    sspec.benign_fraction = 0.25;
    sspec.seed = 60601;
    const SyntheticData data = generate_synthetic(sspec);

    ExperimentRequest request;
    request.spec.algorithm = Algorithm::rf;
    request.spec.trees = 30;
    request.k = 5;
    request.seed = 424242;
    request.threads = acceptance_threads();
    const ExperimentResult result = run_cv_experiment(data.table, tree, request);

    // level-3 correctness implies level-1 correctness on real predictions
    for (const auto& fold : result.folds) {
        for (size_t i = 0; i < fold.truth.size(); ++i) {
            if (fold.hr[i].level3 == fold.truth.level3[i])
                require(fold.hr[i].level1 == fold.truth.level1[i],
                        "level-3 correct but level-1 wrong");
        }
    }

    const EvaluationReport hr = evaluate_model("hr", result, tree);
    const EvaluationReport fl = evaluate_model("fl", result, tree);
    const auto cmp_doc = comparison_to_json(compare(hr, fl));

    // report schema validity: required keys and populated FN/FP tables
    for (const auto* report : {&hr, &fl}) {
        const auto doc = report_to_json(*report);
        for (const char* key : {"schema_version", "kind", "model", "learner", "k", "seed",
                                "levels", "false_negatives", "false_positives", "timings"}) {
            require(doc.contains(key), std::string("report missing key ") + key);
        }
        for (const char* level : {"1", "2", "3"}) {
            const auto& entry = doc.at("levels").at(level);
            for (const char* key :
                 {"labels", "folds", "mean", "pooled", "fold_confusions", "pooled_confusion"}) {
                require(entry.contains(key), std::string("level entry missing ") + key);
            }
            require(entry.at("folds").size() == 5, "expected 5 fold metric sets");
        }
        require(doc.at("false_negatives").at("by_subtype").size() == tree.leaf_count(),
                "FN table not populated for every subtype");
        require(doc.at("false_positives").at("by_predicted_subtype").size() ==
                    tree.leaf_count(),
                "FP table not populated for every subtype");
        // every subtype carries its support so the table is interpretable
        for (const auto& [subtype, entry] :
             doc.at("false_negatives").at("by_subtype").items()) {
            require(entry.at("support").get<uint64_t>() == 200,
                    "subtype support wrong for " + subtype);
        }
    }
    for (const char* key : {"levels", "false_negatives", "false_positives"}) {
        require(cmp_doc.contains(key), std::string("comparison missing key ") + key);
    }
}

void nsl_kdd_reproduction(Harness& harness) {
    const char* csv_path = std::getenv("HICL_NSLKDD_CSV");
    if (csv_path == nullptr || !fs::exists(csv_path)) {
        harness.skip("NSL-KDD reproduction (optional, dataset-dependent)",
                     "set HICL_NSLKDD_CSV to the prepared NSL-KDD csv to enable");
        return;
    }
    harness.criterion("NSL-KDD reproduction (optional, dataset-dependent)", [&] {
        const TaxonomyTree tree = load_taxonomy(
            (fs::path(HICL_DATA_DIR) / "taxonomies" / "nsl_kdd.json").string());
        const DatasetSchema schema = DatasetSchema::load(
            (fs::path(HICL_DATA_DIR) / "schemas" / "nsl_kdd.json").string());
        const DataTable table = load_csv(csv_path, schema);

        ExperimentRequest request;
        request.spec.algorithm = Algorithm::et;
        request.k = 10;
        request.seed = 1;
        request.threads = acceptance_threads();
        const ExperimentResult result = run_cv_experiment(table, tree, request);
        const EvaluationReport hr = evaluate_model("hr", result, tree);
        const EvaluationReport fl = evaluate_model("fl", result, tree);

        const double l2 = hr.levels[1].mean.accuracy * 100.0;
        const double l3 = hr.levels[2].mean.accuracy * 100.0;
        std::cout << "      ET hierarchical level-2 accuracy " << l2 << "%, level-3 " << l3
                  << "%; FN hr=" << hr.fn.total << " fl=" << fl.fn.total << '\n';
        require(std::abs(l2 - 99.47) <= 1.0, "level-2 accuracy outside 99.47 +- 1.0");
        require(std::abs(l3 - 99.29) <= 1.0, "level-3 accuracy outside 99.29 +- 1.0");
        require(hr.fn.total < fl.fn.total,
                "hierarchical FN total not below the flat FN total");
    });
}

}  // namespace

int main() {
    Harness harness;
    harness.criterion("routing consistency on random taxonomies (< 10 s)", routing_consistency);
    harness.criterion("metric oracle equivalence (<= 1e-12)", metric_oracle_equivalence);
    harness.criterion("stratification bound (k=10)", stratification_bound);
    harness.criterion("learner sanity (dt/knn memorization, gnb/lr blobs, lr gradient)",
                      learner_sanity);
    harness.criterion("oracle end-to-end (memorizing learner, test == train)",
                      oracle_end_to_end);
    harness.criterion("cmd_run determinism across thread budgets", determinism_cli);
    harness.criterion("synthetic HR-vs-FL comparison (6x3 taxonomy, rf, k=5)",
                      synthetic_hr_vs_fl);
    nsl_kdd_reproduction(harness);

    if (harness.failures > 0) {
        std::cout << harness.failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all mandatory criteria passed";
    if (harness.skipped > 0) std::cout << " (" << harness.skipped << " optional skipped)";
    std::cout << '\n';
    return 0;
}
