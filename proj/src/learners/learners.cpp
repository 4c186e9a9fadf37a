#include <cmath>
#include <set>
#include <unordered_map>

#include "model_impls.hpp"

namespace hicl {

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::gnb: return "gnb";
        case Algorithm::dt: return "dt";
        case Algorithm::rf: return "rf";
        case Algorithm::et: return "et";
        case Algorithm::knn: return "knn";
        case Algorithm::lr: return "lr";
    }
    return "?";
}

Algorithm algorithm_from_name(std::string_view name) {
    if (name == "gnb") return Algorithm::gnb;
    if (name == "dt") return Algorithm::dt;
    if (name == "rf") return Algorithm::rf;
    if (name == "et") return Algorithm::et;
    if (name == "knn") return Algorithm::knn;
    if (name == "lr") return Algorithm::lr;
    throw ValidationError("unknown algorithm '" + std::string(name) +
                          "' (expected gnb, dt, rf, et, knn or lr)");
}

void LearnerSpec::validate() const {
    if (trees < 1) throw ValidationError("learner: trees must be >= 1");
    if (max_depth && *max_depth < 0) throw ValidationError("learner: max_depth must be >= 0");
    if (min_samples_split < 1) throw ValidationError("learner: min_samples_split must be >= 1");
    if (max_features < 0) throw ValidationError("learner: max_features must be >= 0");
    if (knn_k < 1) throw ValidationError("learner: knn_k must be >= 1");
    if (!(lr_rate > 0.0)) throw ValidationError("learner: lr_rate must be > 0");
    if (lr_epochs < 0) throw ValidationError("learner: lr_epochs must be >= 0");
    if (lr_l2 < 0.0) throw ValidationError("learner: lr_l2 must be >= 0");
}

nlohmann::ordered_json LearnerSpec::to_json() const {
    nlohmann::ordered_json doc;
    doc["algorithm"] = std::string(algorithm_name(algorithm));
    doc["trees"] = trees;
    if (max_depth)
        doc["max_depth"] = *max_depth;
    else
        doc["max_depth"] = nullptr;
    doc["min_samples_split"] = min_samples_split;
    doc["bootstrap"] = bootstrap;
    doc["max_features"] = max_features;
    doc["knn_k"] = knn_k;
    doc["lr_rate"] = lr_rate;
    doc["lr_epochs"] = lr_epochs;
    doc["lr_l2"] = lr_l2;
    doc["seed_salt"] = seed_salt;
    return doc;
}

LearnerSpec LearnerSpec::from_json(const nlohmann::ordered_json& doc) {
    if (!doc.is_object()) throw ParseError("learner: spec must be an object");
    static const std::set<std::string> known_keys = {
        "algorithm", "trees",  "max_depth", "min_samples_split", "bootstrap",
        "max_features", "knn_k", "lr_rate",  "lr_epochs",        "lr_l2",
        "seed_salt"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known_keys.contains(it.key()))
            throw ParseError("learner: unknown key '" + it.key() + "'");
    }
    LearnerSpec spec;
    if (!doc.contains("algorithm") || !doc["algorithm"].is_string())
        throw ParseError("learner: missing string key 'algorithm'");
    spec.algorithm = algorithm_from_name(doc["algorithm"].get<std::string>());
    try {
        if (doc.contains("trees")) spec.trees = doc["trees"].get<int>();
        if (doc.contains("max_depth") && !doc["max_depth"].is_null())
            spec.max_depth = doc["max_depth"].get<int>();
        if (doc.contains("min_samples_split"))
            spec.min_samples_split = doc["min_samples_split"].get<int>();
        if (doc.contains("bootstrap")) spec.bootstrap = doc["bootstrap"].get<bool>();
        if (doc.contains("max_features")) spec.max_features = doc["max_features"].get<int>();
        if (doc.contains("knn_k")) spec.knn_k = doc["knn_k"].get<int>();
        if (doc.contains("lr_rate")) spec.lr_rate = doc["lr_rate"].get<double>();
        if (doc.contains("lr_epochs")) spec.lr_epochs = doc["lr_epochs"].get<int>();
        if (doc.contains("lr_l2")) spec.lr_l2 = doc["lr_l2"].get<double>();
        if (doc.contains("seed_salt")) spec.seed_salt = doc["seed_salt"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("learner: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::vector<std::string> Model::predict(const FeatureMatrix& X, int threads) const {
    auto ids = predict_ids(X, threads);
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(classes_[static_cast<size_t>(id)]);
    return out;
}

nlohmann::ordered_json Model::to_json() const {
    nlohmann::ordered_json doc;
    doc["algorithm"] = std::string(algorithm_name(algorithm()));
    doc["classes"] = classes_;
    doc["params"] = params_to_json();
    return doc;
}

std::shared_ptr<Model> Model::from_json(const nlohmann::ordered_json& doc) {
    try {
        const Algorithm algorithm = algorithm_from_name(doc.at("algorithm").get<std::string>());
        auto classes = doc.at("classes").get<std::vector<std::string>>();
        const auto& params = doc.at("params");
        switch (algorithm) {
            case Algorithm::gnb: return detail::GnbModel::from_params(std::move(classes), params);
            case Algorithm::dt:
                return detail::DecisionTreeModel::from_params(std::move(classes), params);
            case Algorithm::rf:
            case Algorithm::et:
                return detail::ForestModel::from_params(algorithm, std::move(classes), params);
            case Algorithm::knn: return detail::KnnModel::from_params(std::move(classes), params);
            case Algorithm::lr: return detail::LinearModel::from_params(std::move(classes), params);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model: malformed document: ") + e.what());
    }
    throw ValidationError("model: unknown algorithm id");
}

LabelEncoding encode_labels(std::span<const std::string> y) {
    LabelEncoding enc;
    enc.ids.reserve(y.size());
    std::unordered_map<std::string_view, int> index;
    for (const auto& label : y) {
        auto [it, inserted] = index.emplace(label, static_cast<int>(enc.classes.size()));
        if (inserted) enc.classes.push_back(label);
        enc.ids.push_back(it->second);
    }
    return enc;
}

double gaussian_pdf(double x, double mu, double sigma2) {
    const double diff = x - mu;
    return 1.0 / std::sqrt(2.0 * M_PI * sigma2) * std::exp(-diff * diff / (2.0 * sigma2));
}

double gini_impurity(std::span<const uint64_t> counts) {
    uint64_t total = 0;
    for (uint64_t c : counts) total += c;
    if (total == 0) throw ValidationError("gini_impurity: empty counts");
    double sum_sq = 0.0;
    for (uint64_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> softmax(std::span<const double> z) {
    std::vector<double> out(z.size());
    if (z.empty()) return out;
    double top = z[0];
    for (double v : z) top = std::max(top, v);
    double sum = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - top);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

ModelPtr fit_model(const LearnerSpec& spec, const FeatureMatrix& X,
                   std::span<const std::string> y, uint64_t seed, int threads) {
    spec.validate();
    if (X.rows == 0 || y.size() != X.rows)
        throw ValidationError("fit_model: labels must align with a non-empty matrix");
    const uint64_t salted = derive_seed(seed, spec.seed_salt);
    switch (spec.algorithm) {
        case Algorithm::gnb: return detail::gnb_fit(X, y);
        case Algorithm::dt: return detail::dt_fit(X, y, spec);
        case Algorithm::rf: return detail::forest_fit(Algorithm::rf, X, y, spec, salted, threads);
        case Algorithm::et: return detail::forest_fit(Algorithm::et, X, y, spec, salted, threads);
        case Algorithm::knn: {
            auto enc = encode_labels(y);
            return std::make_shared<detail::KnnModel>(std::move(enc.classes), X,
                                                      std::move(enc.ids), spec.knn_k);
        }
        case Algorithm::lr: return detail::lr_fit(X, y, spec);
    }
    throw ValidationError("fit_model: unknown algorithm id");
}

}  // namespace hicl
