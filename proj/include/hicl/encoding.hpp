#pragma once

#include <span>
#include <string>
#include <vector>

#include "hicl/dataset.hpp"

namespace hicl {

/// Dense row-major design matrix of 64-bit reals.
struct FeatureMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;
    std::vector<std::string> feature_names;

    double operator()(size_t r, size_t c) const { return values[r * cols + c]; }
    double& at(size_t r, size_t c) { return values[r * cols + c]; }
    std::span<const double> row(size_t r) const { return {values.data() + r * cols, cols}; }

    FeatureMatrix gather_rows(std::span<const size_t> row_ids) const;
};

/// One-hot vocabularies and min-max ranges fitted on training rows only.
/// Frozen after fit; apply never mutates.
class Encoder {
public:
    struct NumericRange {
        double min = 0.0;
        double max = 0.0;
    };

    /// Fits vocabularies (first-appearance order over `train_rows`) and
    /// numeric ranges from the training rows only.
    static Encoder fit(const DataTable& table, std::span<const size_t> train_rows);

    /// Encodes the given rows. Numeric features scale to (x-min)/(max-min);
    /// constant columns encode to 0.0; categorical values one-hot with
    /// unseen categories mapping to an all-zero block. Out-of-range numeric
    /// values are not clipped.
    FeatureMatrix apply(const DataTable& table, std::span<const size_t> rows) const;

    size_t feature_count() const { return feature_names_.size(); }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    const NumericRange& numeric_range(const std::string& column) const;
    const std::vector<std::string>& vocabulary(const std::string& column) const;

private:
    struct ColumnEncoding {
        std::string name;
        ColumnKind kind;
        size_t table_index = 0;
        size_t first_feature = 0;
        NumericRange range;                  // numeric
        std::vector<std::string> vocab;      // categorical, fit order
    };

    std::vector<ColumnEncoding> columns_;
    std::vector<std::string> feature_names_;
};

}  // namespace hicl
