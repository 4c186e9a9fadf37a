#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hicl {

/// Assignment of every row to one of k folds.
struct FoldPlan {
    int k = 0;
    uint64_t seed = 0;
    std::vector<int> assignments;  // size n, values in [0, k)

    std::vector<size_t> test_rows(int fold) const;
    std::vector<size_t> train_rows(int fold) const;
};

/// Stratified k-fold split over level-3 labels. For every class with at
/// least k members the per-fold counts differ by at most one; classes with
/// fewer members are spread over distinct folds. Deterministic for fixed
/// (labels, k, seed) and independent of thread count.
FoldPlan stratified_kfold(std::span<const std::string> level3_labels, int k, uint64_t seed);

}  // namespace hicl
