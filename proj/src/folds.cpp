#include "hicl/folds.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "hicl/common.hpp"

namespace hicl {

std::vector<size_t> FoldPlan::test_rows(int fold) const {
    std::vector<size_t> rows;
    for (size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) rows.push_back(i);
    }
    return rows;
}

std::vector<size_t> FoldPlan::train_rows(int fold) const {
    std::vector<size_t> rows;
    rows.reserve(assignments.size());
    for (size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) rows.push_back(i);
    }
    return rows;
}

FoldPlan stratified_kfold(std::span<const std::string> level3_labels, int k, uint64_t seed) {
    const size_t n = level3_labels.size();
    if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
    if (static_cast<size_t>(k) > n)
        throw ValidationError("stratified_kfold: k exceeds the number of rows");

    // classes in first-appearance order
    std::unordered_map<std::string_view, size_t> class_index;
    std::vector<std::vector<size_t>> class_rows;
    for (size_t i = 0; i < n; ++i) {
        auto [it, inserted] = class_index.emplace(level3_labels[i], class_rows.size());
        if (inserted) class_rows.emplace_back();
        class_rows[it->second].push_back(i);
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(n, -1);

    Rng rng(derive_seed(seed, std::string_view("stratified_kfold")));
    std::vector<size_t> fold_load(static_cast<size_t>(k), 0);
    std::vector<int> fold_order(static_cast<size_t>(k));
    for (auto& rows : class_rows) {
        rng.shuffle(rows);
        const size_t base = rows.size() / static_cast<size_t>(k);
        const size_t extra = rows.size() % static_cast<size_t>(k);
        // the `extra` folds with the smallest load take one more member;
        // ties resolve to the lower fold index
        std::iota(fold_order.begin(), fold_order.end(), 0);
        std::stable_sort(fold_order.begin(), fold_order.end(),
                         [&](int a, int b) { return fold_load[a] < fold_load[b]; });
        std::vector<size_t> quota(static_cast<size_t>(k), base);
        for (size_t e = 0; e < extra; ++e) quota[static_cast<size_t>(fold_order[e])] += 1;
        size_t next = 0;
        for (int f = 0; f < k; ++f) {
            for (size_t j = 0; j < quota[static_cast<size_t>(f)]; ++j)
                plan.assignments[rows[next++]] = f;
            fold_load[static_cast<size_t>(f)] += quota[static_cast<size_t>(f)];
        }
    }
    return plan;
}

}  // namespace hicl
