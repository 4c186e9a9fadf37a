#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_impls.hpp"

namespace hicl::detail {

ColMajor::ColMajor(const FeatureMatrix& X) : rows(X.rows), cols(X.cols) {
    values.resize(rows * cols);
    for (size_t r = 0; r < rows; ++r) {
        const double* src = X.values.data() + r * cols;
        for (size_t c = 0; c < cols; ++c) values[c * rows + r] = src[c];
    }
}

namespace {

struct PendingNode {
    size_t lo, hi;
    int depth;
    int32_t parent;  // -1 for root
    bool is_left;
};

struct SplitChoice {
    bool found = false;
    size_t feature = 0;
    double threshold = 0.0;
};

// Incremental sum of squared class counts: moving one row of class c from
// right to left changes the sums by +-(2*count +- 1).
struct SweepCounts {
    std::vector<uint64_t> left, right;
    uint64_t sq_left = 0, sq_right = 0;

    void reset(std::span<const uint64_t> node_counts) {
        left.assign(node_counts.size(), 0);
        right.assign(node_counts.begin(), node_counts.end());
        sq_left = 0;
        sq_right = 0;
        for (uint64_t c : node_counts) sq_right += c * c;
    }
    void move_left(int cls) {
        uint64_t& l = left[static_cast<size_t>(cls)];
        uint64_t& r = right[static_cast<size_t>(cls)];
        sq_left += 2 * l + 1;
        sq_right -= 2 * r - 1;
        ++l;
        --r;
    }
};

}  // namespace

Tree build_tree(const ColMajor& data, std::span<const int> y, std::span<const size_t> rows,
                int n_classes, const TreeParams& params, Rng& rng) {
    Tree tree;
    const size_t d = data.cols;
    std::vector<size_t> idx(rows.begin(), rows.end());
    std::vector<size_t> scratch(idx.size());
    std::vector<size_t> sort_buf;
    std::vector<size_t> feature_pool(d);
    std::iota(feature_pool.begin(), feature_pool.end(), size_t{0});
    std::vector<uint64_t> node_counts(static_cast<size_t>(n_classes));
    SweepCounts sweep;

    const size_t mtry = (params.max_features <= 0 || static_cast<size_t>(params.max_features) >= d)
                            ? d
                            : static_cast<size_t>(params.max_features);

    std::vector<PendingNode> stack;
    stack.push_back({0, idx.size(), 0, -1, false});

    auto attach = [&](const PendingNode& pending, int32_t node_id) {
        if (pending.parent < 0) return;
        TreeNode& parent = tree.nodes[static_cast<size_t>(pending.parent)];
        (pending.is_left ? parent.left : parent.right) = node_id;
    };

    while (!stack.empty()) {
        PendingNode pending = stack.back();
        stack.pop_back();
        const size_t lo = pending.lo, hi = pending.hi;
        const size_t m = hi - lo;

        std::fill(node_counts.begin(), node_counts.end(), 0);
        for (size_t i = lo; i < hi; ++i) ++node_counts[static_cast<size_t>(y[idx[i]])];

        int majority = 0;
        uint64_t top = 0, sq_parent = 0;
        for (int c = 0; c < n_classes; ++c) {
            const uint64_t cnt = node_counts[static_cast<size_t>(c)];
            sq_parent += cnt * cnt;
            if (cnt > top) {
                top = cnt;
                majority = c;
            }
        }
        const bool pure = top == m;
        const bool depth_capped = params.max_depth >= 0 && pending.depth >= params.max_depth;

        SplitChoice best;
        if (!pure && !depth_capped && m >= static_cast<size_t>(params.min_samples_split)) {
            // the best candidate wins if it does not increase weighted Gini
            // impurity; zero-gain splits are accepted (both children stay
            // nonempty, so induction still terminates) which is what lets
            // CART carve XOR-like patterns
            const double parent_score =
                static_cast<double>(sq_parent) / static_cast<double>(m);
            double best_score = -1.0;

            // candidate features: everything, or a seeded random subset
            if (mtry < d) {
                for (size_t j = 0; j < mtry; ++j) {
                    const size_t pick = j + rng.bounded(d - j);
                    std::swap(feature_pool[j], feature_pool[pick]);
                }
            }
            for (size_t fi = 0; fi < mtry; ++fi) {
                const size_t f = feature_pool[fi];
                const double* col = data.column(f);
                if (params.random_thresholds) {
                    double lo_v = col[idx[lo]], hi_v = lo_v;
                    for (size_t i = lo + 1; i < hi; ++i) {
                        const double v = col[idx[i]];
                        lo_v = std::min(lo_v, v);
                        hi_v = std::max(hi_v, v);
                    }
                    if (!(lo_v < hi_v)) continue;
                    const double thr = rng.uniform(lo_v, hi_v);
                    sweep.reset(node_counts);
                    size_t n_left = 0;
                    for (size_t i = lo; i < hi; ++i) {
                        if (col[idx[i]] <= thr) {
                            sweep.move_left(y[idx[i]]);
                            ++n_left;
                        }
                    }
                    if (n_left == 0 || n_left == m) continue;
                    const double score =
                        static_cast<double>(sweep.sq_left) / static_cast<double>(n_left) +
                        static_cast<double>(sweep.sq_right) / static_cast<double>(m - n_left);
                    if (score > best_score) {
                        best_score = score;
                        best = {true, f, thr};
                    }
                } else {
                    sort_buf.assign(idx.begin() + static_cast<ptrdiff_t>(lo),
                                    idx.begin() + static_cast<ptrdiff_t>(hi));
                    std::sort(sort_buf.begin(), sort_buf.end(),
                              [col](size_t a, size_t b) { return col[a] < col[b]; });
                    if (col[sort_buf.front()] == col[sort_buf.back()]) continue;
                    sweep.reset(node_counts);
                    for (size_t i = 0; i + 1 < m; ++i) {
                        sweep.move_left(y[sort_buf[i]]);
                        const double v = col[sort_buf[i]];
                        const double v_next = col[sort_buf[i + 1]];
                        if (!(v < v_next)) continue;
                        const size_t n_left = i + 1;
                        const double score =
                            static_cast<double>(sweep.sq_left) / static_cast<double>(n_left) +
                            static_cast<double>(sweep.sq_right) / static_cast<double>(m - n_left);
                        if (score > best_score) {
                            double thr = v + (v_next - v) / 2.0;
                            if (!(thr < v_next)) thr = v;  // midpoint rounded up
                            best_score = score;
                            best = {true, f, thr};
                        }
                    }
                }
            }
            if (best.found && best_score < parent_score) best = SplitChoice{};
        }

        const auto node_id = static_cast<int32_t>(tree.nodes.size());
        attach(pending, node_id);
        if (!best.found) {
            TreeNode leaf;
            leaf.leaf_class = majority;
            tree.nodes.push_back(leaf);
            continue;
        }

        // stable two-way partition of idx[lo, hi)
        const double* col = data.column(best.feature);
        size_t n_left = 0;
        size_t out_right = 0;
        for (size_t i = lo; i < hi; ++i) {
            if (col[idx[i]] <= best.threshold)
                idx[lo + n_left++] = idx[i];
            else
                scratch[out_right++] = idx[i];
        }
        std::copy(scratch.begin(), scratch.begin() + static_cast<ptrdiff_t>(out_right),
                  idx.begin() + static_cast<ptrdiff_t>(lo + n_left));

        TreeNode node;
        node.feature = static_cast<int32_t>(best.feature);
        node.threshold = best.threshold;
        tree.nodes.push_back(node);
        stack.push_back({lo + n_left, hi, pending.depth + 1, node_id, false});
        stack.push_back({lo, lo + n_left, pending.depth + 1, node_id, true});
    }
    return tree;
}

DecisionTreeModel::DecisionTreeModel(std::vector<std::string> classes, Tree tree)
    : tree_(std::move(tree)) {
    classes_ = std::move(classes);
}

std::vector<int> DecisionTreeModel::predict_ids(const FeatureMatrix& X, int threads) const {
    std::vector<int> out(X.rows);
    parallel_for(X.rows, threads, [&](size_t r) { out[r] = tree_.predict_row(X.row(r)); });
    return out;
}

namespace {

nlohmann::ordered_json tree_to_json(const Tree& tree) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"c", n.leaf_class}});
    }
    return nodes;
}

Tree tree_from_json(const nlohmann::ordered_json& nodes) {
    Tree tree;
    tree.nodes.reserve(nodes.size());
    for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at("f").get<int32_t>();
        node.threshold = n.at("t").get<double>();
        node.left = n.at("l").get<int32_t>();
        node.right = n.at("r").get<int32_t>();
        node.leaf_class = n.at("c").get<int32_t>();
        tree.nodes.push_back(node);
    }
    return tree;
}

}  // namespace

nlohmann::ordered_json DecisionTreeModel::params_to_json() const {
    return {{"nodes", tree_to_json(tree_)}};
}

std::shared_ptr<Model> DecisionTreeModel::from_params(std::vector<std::string> classes,
                                                      const nlohmann::ordered_json& params) {
    return std::make_shared<DecisionTreeModel>(std::move(classes),
                                               tree_from_json(params.at("nodes")));
}

ForestModel::ForestModel(Algorithm algorithm, std::vector<std::string> classes,
                         std::vector<Tree> trees)
    : algorithm_(algorithm), trees_(std::move(trees)) {
    classes_ = std::move(classes);
}

std::vector<int> ForestModel::predict_ids(const FeatureMatrix& X, int threads) const {
    std::vector<int> out(X.rows);
    const int n_classes = static_cast<int>(classes_.size());
    parallel_for(X.rows, threads, [&](size_t r) {
        std::vector<uint32_t> votes(static_cast<size_t>(n_classes), 0);
        const auto x = X.row(r);
        for (const auto& tree : trees_) ++votes[static_cast<size_t>(tree.predict_row(x))];
        int winner = 0;
        for (int c = 1; c < n_classes; ++c) {
            if (votes[static_cast<size_t>(c)] > votes[static_cast<size_t>(winner)]) winner = c;
        }
        out[r] = winner;
    });
    return out;
}

nlohmann::ordered_json ForestModel::params_to_json() const {
    nlohmann::ordered_json trees = nlohmann::ordered_json::array();
    for (const auto& tree : trees_) trees.push_back(tree_to_json(tree));
    return {{"trees", trees}};
}

std::shared_ptr<Model> ForestModel::from_params(Algorithm algorithm,
                                                std::vector<std::string> classes,
                                                const nlohmann::ordered_json& params) {
    std::vector<Tree> trees;
    for (const auto& t : params.at("trees")) trees.push_back(tree_from_json(t));
    return std::make_shared<ForestModel>(algorithm, std::move(classes), std::move(trees));
}

ModelPtr dt_fit(const FeatureMatrix& X, std::span<const std::string> y, const LearnerSpec& spec) {
    auto enc = encode_labels(y);
    ColMajor data(X);
    TreeParams params;
    params.max_depth = spec.max_depth ? *spec.max_depth : -1;
    params.min_samples_split = spec.min_samples_split;
    params.max_features = 0;
    std::vector<size_t> rows(X.rows);
    std::iota(rows.begin(), rows.end(), size_t{0});
    Rng rng(0);  // midpoint mode over all features draws nothing
    Tree tree = build_tree(data, enc.ids, rows, static_cast<int>(enc.classes.size()), params, rng);
    return std::make_shared<DecisionTreeModel>(std::move(enc.classes), std::move(tree));
}

ModelPtr forest_fit(Algorithm algorithm, const FeatureMatrix& X, std::span<const std::string> y,
                    const LearnerSpec& spec, uint64_t seed, int threads) {
    auto enc = encode_labels(y);
    ColMajor data(X);
    const size_t d = X.cols;
    TreeParams params;
    params.max_depth = spec.max_depth ? *spec.max_depth : -1;
    params.min_samples_split = spec.min_samples_split;
    params.random_thresholds = algorithm == Algorithm::et;
    if (spec.max_features > 0)
        params.max_features = spec.max_features;
    else
        params.max_features = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    const bool bootstrap = algorithm == Algorithm::rf && spec.bootstrap;
    const int n_classes = static_cast<int>(enc.classes.size());
    std::vector<Tree> trees(static_cast<size_t>(spec.trees));
    parallel_for(static_cast<size_t>(spec.trees), threads, [&](size_t t) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
        std::vector<size_t> rows(X.rows);
        if (bootstrap) {
            for (auto& r : rows) r = rng.bounded(X.rows);
        } else {
            std::iota(rows.begin(), rows.end(), size_t{0});
        }
        trees[t] = build_tree(data, enc.ids, rows, n_classes, params, rng);
    });
    return std::make_shared<ForestModel>(algorithm, std::move(enc.classes), std::move(trees));
}

}  // namespace hicl::detail
