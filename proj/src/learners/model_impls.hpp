#pragma once

// Internal concrete model types shared by the learner translation units.

#include <span>
#include <vector>

#include "hicl/common.hpp"
#include "hicl/learners.hpp"

namespace hicl::detail {

/// Feature-major copy of a design matrix; tree induction walks one feature
/// over many rows, which is hostile to row-major layout.
struct ColMajor {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;  // cols blocks of rows values

    explicit ColMajor(const FeatureMatrix& X);
    const double* column(size_t f) const { return values.data() + f * rows; }
};

struct TreeNode {
    int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int32_t left = -1;     // x[feature] <= threshold
    int32_t right = -1;
    int32_t leaf_class = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;

    int predict_row(std::span<const double> x) const {
        int32_t at = 0;
        while (nodes[static_cast<size_t>(at)].feature >= 0) {
            const TreeNode& node = nodes[static_cast<size_t>(at)];
            at = x[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
        }
        return nodes[static_cast<size_t>(at)].leaf_class;
    }
};

struct TreeParams {
    int max_depth = -1;           // -1 = unlimited
    int min_samples_split = 2;
    int max_features = 0;         // 0 or >= d = all features
    bool random_thresholds = false;  // extremely randomized mode
};

/// CART induction over the rows listed in `rows` (duplicates allowed, e.g.
/// bootstrap samples). Splits maximize Gini impurity decrease; candidate
/// thresholds are midpoints of consecutive distinct sorted values, or one
/// uniform draw per feature in random-threshold mode.
Tree build_tree(const ColMajor& data, std::span<const int> y, std::span<const size_t> rows,
                int n_classes, const TreeParams& params, Rng& rng);

class DecisionTreeModel final : public Model {
public:
    DecisionTreeModel(std::vector<std::string> classes, Tree tree);
    Algorithm algorithm() const override { return Algorithm::dt; }
    std::vector<int> predict_ids(const FeatureMatrix& X, int threads) const override;
    nlohmann::ordered_json params_to_json() const override;
    static std::shared_ptr<Model> from_params(std::vector<std::string> classes,
                                              const nlohmann::ordered_json& params);

    const Tree& tree() const { return tree_; }

private:
    Tree tree_;
};

class ForestModel final : public Model {
public:
    ForestModel(Algorithm algorithm, std::vector<std::string> classes, std::vector<Tree> trees);
    Algorithm algorithm() const override { return algorithm_; }
    std::vector<int> predict_ids(const FeatureMatrix& X, int threads) const override;
    nlohmann::ordered_json params_to_json() const override;
    static std::shared_ptr<Model> from_params(Algorithm algorithm,
                                              std::vector<std::string> classes,
                                              const nlohmann::ordered_json& params);

private:
    Algorithm algorithm_;
    std::vector<Tree> trees_;
};

class GnbModel final : public Model {
public:
    GnbModel(std::vector<std::string> classes, std::vector<double> log_prior,
             std::vector<double> means, std::vector<double> variances, size_t d);
    Algorithm algorithm() const override { return Algorithm::gnb; }
    std::vector<int> predict_ids(const FeatureMatrix& X, int threads) const override;
    nlohmann::ordered_json params_to_json() const override;
    static std::shared_ptr<Model> from_params(std::vector<std::string> classes,
                                              const nlohmann::ordered_json& params);

private:
    std::vector<double> log_prior_;  // per class
    std::vector<double> means_;      // class-major C x d
    std::vector<double> variances_;  // class-major C x d, smoothed
    size_t d_ = 0;
};

class KnnModel final : public Model {
public:
    KnnModel(std::vector<std::string> classes, FeatureMatrix train_X, std::vector<int> train_ids,
             int k);
    Algorithm algorithm() const override { return Algorithm::knn; }
    std::vector<int> predict_ids(const FeatureMatrix& X, int threads) const override;
    nlohmann::ordered_json params_to_json() const override;
    static std::shared_ptr<Model> from_params(std::vector<std::string> classes,
                                              const nlohmann::ordered_json& params);

private:
    FeatureMatrix train_X_;
    std::vector<int> train_ids_;
    int k_ = 1;
};

class LinearModel final : public Model {
public:
    LinearModel(std::vector<std::string> classes, std::vector<double> weights,
                std::vector<double> bias, size_t d);
    Algorithm algorithm() const override { return Algorithm::lr; }
    std::vector<int> predict_ids(const FeatureMatrix& X, int threads) const override;
    nlohmann::ordered_json params_to_json() const override;
    static std::shared_ptr<Model> from_params(std::vector<std::string> classes,
                                              const nlohmann::ordered_json& params);

private:
    std::vector<double> weights_;  // class-major C x d
    std::vector<double> bias_;     // per class
    size_t d_ = 0;
};

/// k nearest ids under (squared distance, train index) ordering, voted.
int knn_vote(const FeatureMatrix& train_X, std::span<const int> train_ids, int n_classes,
             std::span<const double> query, int k);

ModelPtr gnb_fit(const FeatureMatrix& X, std::span<const std::string> y);
ModelPtr dt_fit(const FeatureMatrix& X, std::span<const std::string> y, const LearnerSpec& spec);
ModelPtr forest_fit(Algorithm algorithm, const FeatureMatrix& X, std::span<const std::string> y,
                    const LearnerSpec& spec, uint64_t seed, int threads);
ModelPtr lr_fit(const FeatureMatrix& X, std::span<const std::string> y, const LearnerSpec& spec);

}  // namespace hicl::detail
