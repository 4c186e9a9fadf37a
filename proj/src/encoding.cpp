#include "hicl/encoding.hpp"

#include <unordered_map>

#include "hicl/common.hpp"

namespace hicl {

FeatureMatrix FeatureMatrix::gather_rows(std::span<const size_t> row_ids) const {
    FeatureMatrix out;
    out.rows = row_ids.size();
    out.cols = cols;
    out.feature_names = feature_names;
    out.values.resize(out.rows * cols);
    for (size_t i = 0; i < row_ids.size(); ++i) {
        const double* src = values.data() + row_ids[i] * cols;
        std::copy(src, src + cols, out.values.data() + i * cols);
    }
    return out;
}

Encoder Encoder::fit(const DataTable& table, std::span<const size_t> train_rows) {
    if (train_rows.empty()) throw ValidationError("encoder: empty training row set");
    Encoder enc;
    for (size_t c = 0; c < table.columns.size(); ++c) {
        const auto& column = table.columns[c];
        if (column.kind == ColumnKind::target) continue;
        ColumnEncoding ce;
        ce.name = column.name;
        ce.kind = column.kind;
        ce.table_index = c;
        ce.first_feature = enc.feature_names_.size();
        if (column.kind == ColumnKind::numeric) {
            double lo = column.numbers[train_rows[0]];
            double hi = lo;
            for (size_t r : train_rows) {
                double v = column.numbers[r];
                if (v < lo) lo = v;
                if (v > hi) hi = v;
            }
            ce.range = {lo, hi};
            enc.feature_names_.push_back(column.name);
        } else {
            std::unordered_map<std::string, size_t> seen;
            for (size_t r : train_rows) {
                const std::string& v = column.strings[r];
                if (seen.emplace(v, ce.vocab.size()).second) ce.vocab.push_back(v);
            }
            for (const auto& v : ce.vocab) enc.feature_names_.push_back(column.name + "=" + v);
        }
        enc.columns_.push_back(std::move(ce));
    }
    return enc;
}

FeatureMatrix Encoder::apply(const DataTable& table, std::span<const size_t> rows) const {
    FeatureMatrix out;
    out.rows = rows.size();
    out.cols = feature_names_.size();
    out.feature_names = feature_names_;
    out.values.assign(out.rows * out.cols, 0.0);
    for (const auto& ce : columns_) {
        const auto& column = table.columns[ce.table_index];
        if (ce.kind == ColumnKind::numeric) {
            const double span = ce.range.max - ce.range.min;
            for (size_t i = 0; i < rows.size(); ++i) {
                const double v = column.numbers[rows[i]];
                out.at(i, ce.first_feature) = span > 0.0 ? (v - ce.range.min) / span : 0.0;
            }
        } else {
            std::unordered_map<std::string_view, size_t> index;
            index.reserve(ce.vocab.size());
            for (size_t j = 0; j < ce.vocab.size(); ++j) index.emplace(ce.vocab[j], j);
            for (size_t i = 0; i < rows.size(); ++i) {
                auto it = index.find(column.strings[rows[i]]);
                if (it != index.end()) out.at(i, ce.first_feature + it->second) = 1.0;
            }
        }
    }
    return out;
}

const Encoder::NumericRange& Encoder::numeric_range(const std::string& column) const {
    for (const auto& ce : columns_) {
        if (ce.name == column && ce.kind == ColumnKind::numeric) return ce.range;
    }
    throw ValidationError("encoder: no numeric column '" + column + "'");
}

const std::vector<std::string>& Encoder::vocabulary(const std::string& column) const {
    for (const auto& ce : columns_) {
        if (ce.name == column && ce.kind == ColumnKind::categorical) return ce.vocab;
    }
    throw ValidationError("encoder: no categorical column '" + column + "'");
}

}  // namespace hicl
