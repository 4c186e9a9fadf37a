#pragma once

#include <span>
#include <string>
#include <vector>

#include "hicl/taxonomy.hpp"

namespace hicl {

enum class ColumnKind : uint8_t { numeric, categorical, target };

/// Column kinds and target declaration for a CSV dataset. Stored as a JSON
/// document with fields `target`, `numeric`, `categorical` and an optional
/// `drop` list for columns to ignore at load.
struct DatasetSchema {
    std::string target;
    std::vector<std::string> numeric;
    std::vector<std::string> categorical;
    std::vector<std::string> drop;

    static DatasetSchema parse(std::string_view json_text);
    static DatasetSchema load(const std::string& path);
    std::string serialize() const;
};

/// Typed columnar table. Numeric cells are parsed at load; categorical and
/// target cells stay strings. Immutable once loaded.
struct DataTable {
    struct Column {
        std::string name;
        ColumnKind kind;
        std::vector<double> numbers;    // numeric columns
        std::vector<std::string> strings;  // categorical / target columns
    };

    std::vector<Column> columns;
    size_t row_count = 0;
    size_t target_index = 0;

    const Column& target() const { return columns[target_index]; }
};

/// Parses RFC-4180 style CSV text (header row required) against a schema.
DataTable table_from_csv_text(std::string_view text, const DatasetSchema& schema);

DataTable load_csv(const std::string& path, const DatasetSchema& schema);

/// Per-row labels at all three levels, aligned with the table rows.
struct LabelFrame {
    std::vector<Level1> level1;
    std::vector<std::string> level2;
    std::vector<std::string> level3;

    size_t size() const { return level3.size(); }
};

/// Derives all three label levels from the target column. Every target value
/// must be the benign label or a subtype of the tree.
LabelFrame derive_labels(const DataTable& table, const TaxonomyTree& tree);

LabelFrame slice(const LabelFrame& frame, std::span<const size_t> rows);

/// Row subsets and label vectors for each classifier node of the hierarchy.
/// Row indices refer to the frame the sets were derived from.
struct NodeTrainingSets {
    std::vector<size_t> level1_rows;          // all training rows
    std::vector<std::string> level1_y;        // "benign" / "attack"
    std::vector<size_t> level2_rows;          // attack rows only
    std::vector<std::string> level2_y;        // family labels
    struct FamilySet {
        std::string family;
        std::vector<size_t> rows;
        std::vector<std::string> y;           // subtype labels
    };
    std::vector<FamilySet> level3;            // one entry per taxonomy family
};

/// Splits training rows into the per-node training sets of the hierarchy.
/// Families without rows get an empty set; the model layer decides fallback.
NodeTrainingSets node_training_sets(const LabelFrame& labels, const TaxonomyTree& tree,
                                    std::span<const size_t> train_rows);

}  // namespace hicl
