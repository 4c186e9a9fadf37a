#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hicl/encoding.hpp"

namespace hicl {

enum class Algorithm : uint8_t { gnb, dt, rf, et, knn, lr };

std::string_view algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view name);

/// Algorithm id plus hyperparameters. Unused fields are ignored by the
/// algorithms that do not consume them.
struct LearnerSpec {
    Algorithm algorithm = Algorithm::rf;
    int trees = 100;
    std::optional<int> max_depth;    // unlimited when empty
    int min_samples_split = 2;
    bool bootstrap = true;           // rf only
    int max_features = 0;            // per-split subset size; 0 = ceil(sqrt(d))
    int knn_k = 5;
    double lr_rate = 0.1;
    int lr_epochs = 300;
    double lr_l2 = 1e-4;
    uint64_t seed_salt = 0;

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static LearnerSpec from_json(const nlohmann::ordered_json& doc);
};

/// A trained classifier. Immutable after fit; predict is reentrant.
/// `classes()` lists labels in first-appearance order of the training
/// targets; every prediction is drawn from it and every argmax tie breaks
/// towards the earlier class.
class Model {
public:
    virtual ~Model() = default;

    virtual Algorithm algorithm() const = 0;
    const std::vector<std::string>& classes() const { return classes_; }

    /// Predicted class ids (indices into classes()).
    virtual std::vector<int> predict_ids(const FeatureMatrix& X, int threads) const = 0;

    std::vector<std::string> predict(const FeatureMatrix& X, int threads = 1) const;

    nlohmann::ordered_json to_json() const;
    static std::shared_ptr<Model> from_json(const nlohmann::ordered_json& doc);

protected:
    virtual nlohmann::ordered_json params_to_json() const = 0;
    std::vector<std::string> classes_;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Fits the algorithm named by the spec. Deterministic for fixed
/// (spec, X, y, seed), independent of `threads`.
ModelPtr fit_model(const LearnerSpec& spec, const FeatureMatrix& X,
                   std::span<const std::string> y, uint64_t seed, int threads = 1);

// ---- algorithm primitives ----

/// Density of N(mu, sigma2) at x. sigma2 must be positive.
double gaussian_pdf(double x, double mu, double sigma2);

/// 1 - sum((c_i/n)^2). Throws ValidationError for empty or all-zero counts.
double gini_impurity(std::span<const uint64_t> counts);

/// Overflow-safe logistic function.
double sigmoid(double z);

/// Max-shifted softmax; output sums to 1.
std::vector<double> softmax(std::span<const double> z);

/// k-nearest-neighbour vote with Euclidean distance. Distance ties resolve
/// to the lower training-row index, vote ties to the earlier class.
/// Requires 1 <= k <= number of training rows.
std::vector<std::string> knn_predict(const FeatureMatrix& train_X,
                                     std::span<const std::string> train_y,
                                     const FeatureMatrix& query_X, int k, int threads = 1);

/// Cross-entropy loss with L2 penalty for multinomial logistic regression.
/// W is row-major n_classes x d, b has n_classes entries. The bias carries
/// no penalty.
double lr_loss(const FeatureMatrix& X, std::span<const int> y, int n_classes,
               std::span<const double> W, std::span<const double> b, double l2);

/// Analytic gradient of lr_loss into gW (n_classes x d) and gb (n_classes).
void lr_gradient(const FeatureMatrix& X, std::span<const int> y, int n_classes,
                 std::span<const double> W, std::span<const double> b, double l2,
                 std::span<double> gW, std::span<double> gb);

/// Training labels compacted to dense ids in first-appearance order.
struct LabelEncoding {
    std::vector<std::string> classes;
    std::vector<int> ids;
};
LabelEncoding encode_labels(std::span<const std::string> y);

}  // namespace hicl
