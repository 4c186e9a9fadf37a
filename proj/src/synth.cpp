#include "hicl/synth.hpp"

#include <cmath>
#include <sstream>

#include "hicl/common.hpp"

namespace hicl {

void SyntheticSpec::validate() const {
    auto violations = hicl::validate(taxonomy);
    if (!violations.empty()) throw ValidationError("synth: invalid taxonomy: " + violations[0]);
    if (per_leaf < 1) throw ValidationError("synth: per_leaf must be >= 1");
    if (dim < 1) throw ValidationError("synth: dim must be >= 1");
    if (!(sigma > 0.0)) throw ValidationError("synth: sigma must be > 0");
    if (separation < 0.0) throw ValidationError("synth: separation must be >= 0");
    if (!(benign_fraction > 0.0 && benign_fraction < 1.0))
        throw ValidationError("synth: benign_fraction must be in (0,1)");
}

namespace {

// Geometry: benign center at the origin; family centers sit on the first
// axis at L + 4s*i with L = 4s*(n_families + 2), so the largest
// inter-family center distance 4s*(n_families - 1) stays below every
// family-to-benign distance. Leaf centers offset 1.5s from their family
// center, orthogonal to the family axis, keeping intra-family center
// distances at most 3s < 4s.
std::vector<std::vector<double>> leaf_centers(const SyntheticSpec& spec, Rng& rng) {
    const auto& families = spec.taxonomy.families();
    const double s = spec.separation;
    const double base = 4.0 * s * (static_cast<double>(families.size()) + 2.0);
    std::vector<std::vector<double>> centers;
    for (size_t fi = 0; fi < families.size(); ++fi) {
        const double family_x = base + 4.0 * s * static_cast<double>(fi);
        const size_t n_subtypes = families[fi].subtypes.size();
        for (size_t si = 0; si < n_subtypes; ++si) {
            std::vector<double> c(spec.dim, 0.0);
            c[0] = family_x;
            if (spec.dim >= 2) {
                // random unit direction in the subspace orthogonal to axis 0
                std::vector<double> dir(spec.dim - 1);
                double norm = 0.0;
                for (auto& v : dir) {
                    v = rng.normal();
                    norm += v * v;
                }
                norm = std::sqrt(norm);
                if (norm <= 0.0) {
                    dir.assign(spec.dim - 1, 0.0);
                    dir[0] = 1.0;
                    norm = 1.0;
                }
                for (size_t j = 0; j < dir.size(); ++j) c[j + 1] = 1.5 * s * dir[j] / norm;
            } else {
                const double sign = si % 2 == 0 ? 1.0 : -1.0;
                c[0] += sign * 1.5 * s * static_cast<double>(si + 1) /
                        static_cast<double>(n_subtypes + 1);
            }
            centers.push_back(std::move(c));
        }
    }
    return centers;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, std::string_view("synth")));

    const auto& tree = spec.taxonomy;
    size_t attack_rows = 0;
    for (const auto& fam : tree.families()) attack_rows += fam.subtypes.size() * spec.per_leaf;
    const auto benign_rows = static_cast<size_t>(std::llround(
        static_cast<double>(attack_rows) * spec.benign_fraction / (1.0 - spec.benign_fraction)));

    SyntheticData out;
    out.schema.target = "label";
    for (size_t j = 0; j < spec.dim; ++j) out.schema.numeric.push_back("f" + std::to_string(j));

    DataTable& table = out.table;
    for (size_t j = 0; j < spec.dim; ++j)
        table.columns.push_back({"f" + std::to_string(j), ColumnKind::numeric, {}, {}});
    table.columns.push_back({"label", ColumnKind::target, {}, {}});
    table.target_index = spec.dim;

    auto emit_row = [&](std::span<const double> center, const std::string& label) {
        for (size_t j = 0; j < spec.dim; ++j)
            table.columns[j].numbers.push_back(center[j] + spec.sigma * rng.normal());
        table.columns[spec.dim].strings.push_back(label);
    };

    const std::vector<double> benign_center(spec.dim, 0.0);
    const auto centers = leaf_centers(spec, rng);

    for (size_t i = 0; i < benign_rows; ++i) emit_row(benign_center, tree.benign_label());
    size_t leaf = 0;
    for (const auto& fam : tree.families()) {
        for (const auto& subtype : fam.subtypes) {
            for (size_t i = 0; i < spec.per_leaf; ++i) emit_row(centers[leaf], subtype);
            ++leaf;
        }
    }
    table.row_count = benign_rows + attack_rows;
    return out;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

std::string synthetic_to_csv(const SyntheticData& data) {
    std::ostringstream csv;
    const auto& table = data.table;
    for (size_t c = 0; c < table.columns.size(); ++c) {
        if (c) csv << ',';
        csv << csv_escape(table.columns[c].name);
    }
    csv << '\n';
    for (size_t r = 0; r < table.row_count; ++r) {
        for (size_t c = 0; c < table.columns.size(); ++c) {
            if (c) csv << ',';
            const auto& column = table.columns[c];
            if (column.kind == ColumnKind::numeric)
                csv << format_double(column.numbers[r]);
            else
                csv << csv_escape(column.strings[r]);
        }
        csv << '\n';
    }
    return csv.str();
}

}  // namespace hicl
