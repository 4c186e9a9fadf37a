#include "hicl/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "hicl/common.hpp"

namespace hicl {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> string_list(const ordered_json& doc, const char* key) {
    std::vector<std::string> out;
    if (!doc.contains(key)) return out;
    if (!doc[key].is_array())
        throw ParseError(std::string("schema: key '") + key + "' must be an array");
    for (const auto& v : doc[key]) {
        if (!v.is_string())
            throw ParseError(std::string("schema: key '") + key + "' contains a non-string entry");
        out.push_back(std::string(trim(v.get<std::string>())));
    }
    return out;
}

}  // namespace

DatasetSchema DatasetSchema::parse(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("schema: malformed syntax: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("schema: top-level value must be an object");
    static const std::set<std::string> known_keys = {"target", "numeric", "categorical", "drop"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known_keys.contains(it.key()))
            throw ParseError("schema: unknown key '" + it.key() + "'");
    }
    DatasetSchema schema;
    if (!doc.contains("target") || !doc["target"].is_string())
        throw ParseError("schema: missing string key 'target'");
    schema.target = std::string(trim(doc["target"].get<std::string>()));
    schema.numeric = string_list(doc, "numeric");
    schema.categorical = string_list(doc, "categorical");
    schema.drop = string_list(doc, "drop");

    std::set<std::string> seen;
    auto check = [&](const std::string& name, const char* where) {
        if (!seen.insert(name).second)
            throw ParseError("schema: column '" + name + "' declared more than once (" + where + ")");
    };
    check(schema.target, "target");
    for (const auto& c : schema.numeric) check(c, "numeric");
    for (const auto& c : schema.categorical) check(c, "categorical");
    for (const auto& c : schema.drop) check(c, "drop");
    return schema;
}

DatasetSchema DatasetSchema::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schema file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string DatasetSchema::serialize() const {
    ordered_json doc;
    doc["target"] = target;
    doc["numeric"] = numeric;
    doc["categorical"] = categorical;
    doc["drop"] = drop;
    return doc.dump(2) + "\n";
}

namespace {

// RFC-4180 field scanner. Appends the fields of one record to `fields`
// starting at position `pos`, returns the position after the record's line
// break. Quoted fields may contain commas, escaped quotes and newlines.
size_t scan_record(std::string_view text, size_t pos, std::vector<std::string>& fields,
                   size_t line_no) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    for (;;) {
        if (pos >= text.size()) {
            if (in_quotes)
                throw ParseError("csv: unterminated quoted field at line " + std::to_string(line_no));
            fields.push_back(std::move(field));
            return pos;
        }
        char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                field.push_back(c);
                ++pos;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !quoted_field) {
                    in_quotes = true;
                    quoted_field = true;
                    ++pos;
                } else {
                    field.push_back(c);  // stray quote inside unquoted field
                    ++pos;
                }
                break;
            case ',':
                fields.push_back(std::move(field));
                field.clear();
                quoted_field = false;
                ++pos;
                break;
            case '\r':
                if (pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
                [[fallthrough]];
            case '\n':
                fields.push_back(std::move(field));
                return pos + 1;
            default:
                field.push_back(c);
                ++pos;
        }
    }
}

double parse_numeric_cell(std::string_view raw, size_t row, const std::string& column) {
    std::string_view cell = trim(raw);
    if (cell.empty())
        throw ParseError("csv: missing value at row " + std::to_string(row) + ", column '" +
                         column + "'");
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError("csv: unparsable numeric value '" + std::string(raw) + "' at row " +
                         std::to_string(row) + ", column '" + column + "'");
    if (!std::isfinite(value))
        throw ParseError("csv: non-finite numeric value at row " + std::to_string(row) +
                         ", column '" + column + "'");
    return value;
}

}  // namespace

DataTable table_from_csv_text(std::string_view text, const DatasetSchema& schema) {
    if (text.starts_with("\xef\xbb\xbf")) text.remove_prefix(3);  // UTF-8 BOM
    if (trim(text).empty()) throw ParseError("csv: empty file");

    std::vector<std::string> header;
    size_t pos = scan_record(text, 0, header, 1);
    for (auto& h : header) h = std::string(trim(h));

    std::set<std::string> drop(schema.drop.begin(), schema.drop.end());
    std::unordered_map<std::string, ColumnKind> declared;
    declared.emplace(schema.target, ColumnKind::target);
    for (const auto& c : schema.numeric) declared.emplace(c, ColumnKind::numeric);
    for (const auto& c : schema.categorical) declared.emplace(c, ColumnKind::categorical);

    DataTable table;
    // keep_map[i] = index of csv column i in table.columns, or -1 when dropped
    std::vector<int> keep_map(header.size(), -1);
    std::set<std::string> seen_headers;
    for (size_t i = 0; i < header.size(); ++i) {
        const std::string& name = header[i];
        if (!seen_headers.insert(name).second)
            throw ParseError("csv: duplicate header column '" + name + "'");
        if (drop.contains(name)) continue;
        auto it = declared.find(name);
        if (it == declared.end())
            throw ParseError("csv: column '" + name + "' not declared in schema");
        keep_map[i] = static_cast<int>(table.columns.size());
        table.columns.push_back(DataTable::Column{name, it->second, {}, {}});
    }
    for (const auto& [name, kind] : declared) {
        if (!seen_headers.contains(name))
            throw ParseError("csv: missing column '" + name + "'");
        (void)kind;
    }
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (table.columns[i].kind == ColumnKind::target) table.target_index = i;
    }

    std::vector<std::string> fields;
    size_t row = 0;
    size_t line_no = 2;
    while (pos < text.size()) {
        // skip a trailing blank line
        if (text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')) {
            size_t probe = pos + (text[pos] == '\r' ? 2 : 1);
            if (probe >= text.size()) break;
        }
        pos = scan_record(text, pos, fields, line_no);
        if (fields.size() == 1 && trim(fields[0]).empty() && pos >= text.size()) break;
        if (fields.size() != header.size())
            throw ParseError("csv: row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        for (size_t i = 0; i < fields.size(); ++i) {
            int col = keep_map[i];
            if (col < 0) continue;
            auto& column = table.columns[static_cast<size_t>(col)];
            if (column.kind == ColumnKind::numeric) {
                column.numbers.push_back(parse_numeric_cell(fields[i], row, column.name));
            } else {
                std::string value = std::string(trim(fields[i]));
                if (value.empty())
                    throw ParseError("csv: missing value at row " + std::to_string(row) +
                                     ", column '" + column.name + "'");
                column.strings.push_back(std::move(value));
            }
        }
        ++row;
        ++line_no;
    }
    if (row == 0) throw ParseError("csv: empty dataset (header only)");
    table.row_count = row;
    return table;
}

DataTable load_csv(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open dataset file '" + path + "'");
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::string text(static_cast<size_t>(size), '\0');
    if (size > 0 && !in.read(text.data(), size))
        throw IoError("read failed for dataset file '" + path + "'");
    return table_from_csv_text(text, schema);
}

LabelFrame derive_labels(const DataTable& table, const TaxonomyTree& tree) {
    const auto& target = table.target();
    LabelFrame frame;
    frame.level1.reserve(table.row_count);
    frame.level2.reserve(table.row_count);
    frame.level3.reserve(table.row_count);
    for (size_t r = 0; r < table.row_count; ++r) {
        const std::string& value = target.strings[r];
        if (tree.is_benign(value)) {
            frame.level1.push_back(Level1::benign);
            frame.level2.push_back(tree.benign_label());
            frame.level3.push_back(tree.benign_label());
        } else if (const FamilyNode* fam = tree.find_family_of(value)) {
            frame.level1.push_back(Level1::attack);
            frame.level2.push_back(fam->label);
            frame.level3.push_back(value);
        } else {
            throw ValidationError("row " + std::to_string(r) + ": unknown label '" + value + "'");
        }
    }
    return frame;
}

LabelFrame slice(const LabelFrame& frame, std::span<const size_t> rows) {
    LabelFrame out;
    out.level1.reserve(rows.size());
    out.level2.reserve(rows.size());
    out.level3.reserve(rows.size());
    for (size_t r : rows) {
        out.level1.push_back(frame.level1[r]);
        out.level2.push_back(frame.level2[r]);
        out.level3.push_back(frame.level3[r]);
    }
    return out;
}

NodeTrainingSets node_training_sets(const LabelFrame& labels, const TaxonomyTree& tree,
                                    std::span<const size_t> train_rows) {
    NodeTrainingSets sets;
    sets.level3.reserve(tree.families().size());
    std::unordered_map<std::string, size_t> family_slot;
    for (const auto& fam : tree.families()) {
        family_slot.emplace(fam.label, sets.level3.size());
        sets.level3.push_back({fam.label, {}, {}});
    }
    sets.level1_rows.assign(train_rows.begin(), train_rows.end());
    sets.level1_y.reserve(train_rows.size());
    for (size_t r : train_rows) {
        const bool is_attack = labels.level1[r] == Level1::attack;
        sets.level1_y.push_back(level1_class(labels.level1[r]));
        if (!is_attack) continue;
        sets.level2_rows.push_back(r);
        sets.level2_y.push_back(labels.level2[r]);
        auto& fam_set = sets.level3[family_slot.at(labels.level2[r])];
        fam_set.rows.push_back(r);
        fam_set.y.push_back(labels.level3[r]);
    }
    return sets;
}

}  // namespace hicl
