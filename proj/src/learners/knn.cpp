#include <algorithm>

#include "model_impls.hpp"

namespace hicl::detail {

int knn_vote(const FeatureMatrix& train_X, std::span<const int> train_ids, int n_classes,
             std::span<const double> query, int k) {
    const size_t n = train_X.rows;
    const size_t d = train_X.cols;
    std::vector<std::pair<double, size_t>> dist(n);
    for (size_t i = 0; i < n; ++i) {
        const double* row = train_X.values.data() + i * d;
        double d2 = 0.0;
        for (size_t j = 0; j < d; ++j) {
            const double diff = row[j] - query[j];
            d2 += diff * diff;
        }
        dist[i] = {d2, i};
    }
    // (distance, train index) is a strict total order, so the selected set
    // is unique and deterministic
    const auto kth = dist.begin() + k;
    std::nth_element(dist.begin(), kth - 1, dist.end());
    std::vector<uint32_t> votes(static_cast<size_t>(n_classes), 0);
    for (auto it = dist.begin(); it != kth; ++it)
        ++votes[static_cast<size_t>(train_ids[it->second])];
    int winner = 0;
    for (int c = 1; c < n_classes; ++c) {
        if (votes[static_cast<size_t>(c)] > votes[static_cast<size_t>(winner)]) winner = c;
    }
    return winner;
}

KnnModel::KnnModel(std::vector<std::string> classes, FeatureMatrix train_X,
                   std::vector<int> train_ids, int k)
    : train_X_(std::move(train_X)), train_ids_(std::move(train_ids)), k_(k) {
    classes_ = std::move(classes);
}

std::vector<int> KnnModel::predict_ids(const FeatureMatrix& X, int threads) const {
    // a node may hold fewer rows than k; vote over what exists
    const int k = std::min<int>(k_, static_cast<int>(train_X_.rows));
    std::vector<int> out(X.rows);
    parallel_for(X.rows, threads, [&](size_t r) {
        out[r] = knn_vote(train_X_, train_ids_, static_cast<int>(classes_.size()), X.row(r), k);
    });
    return out;
}

nlohmann::ordered_json KnnModel::params_to_json() const {
    return {{"k", k_},
            {"rows", train_X_.rows},
            {"cols", train_X_.cols},
            {"values", train_X_.values},
            {"ids", train_ids_}};
}

std::shared_ptr<Model> KnnModel::from_params(std::vector<std::string> classes,
                                             const nlohmann::ordered_json& params) {
    FeatureMatrix train;
    train.rows = params.at("rows").get<size_t>();
    train.cols = params.at("cols").get<size_t>();
    train.values = params.at("values").get<std::vector<double>>();
    return std::make_shared<KnnModel>(std::move(classes), std::move(train),
                                      params.at("ids").get<std::vector<int>>(),
                                      params.at("k").get<int>());
}

}  // namespace hicl::detail

namespace hicl {

std::vector<std::string> knn_predict(const FeatureMatrix& train_X,
                                     std::span<const std::string> train_y,
                                     const FeatureMatrix& query_X, int k, int threads) {
    if (train_X.rows == 0) throw ValidationError("knn: empty training set");
    if (k < 1 || static_cast<size_t>(k) > train_X.rows)
        throw ValidationError("knn: k must satisfy 1 <= k <= n_train");
    auto enc = encode_labels(train_y);
    std::vector<int> ids(query_X.rows);
    parallel_for(query_X.rows, threads, [&](size_t r) {
        ids[r] = detail::knn_vote(train_X, enc.ids, static_cast<int>(enc.classes.size()),
                                  query_X.row(r), k);
    });
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(enc.classes[static_cast<size_t>(id)]);
    return out;
}

}  // namespace hicl
