#include "hicl/taxonomy.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hicl/common.hpp"

namespace hicl {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Level1 v) {
    return v == Level1::benign ? "benign" : "attack";
}

TaxonomyTree::TaxonomyTree(std::string benign_label, std::vector<FamilyNode> families,
                           std::string version, std::string root_label)
    : root_label_(std::move(root_label)),
      benign_label_(std::move(benign_label)),
      families_(std::move(families)),
      version_(std::move(version)) {
    for (size_t i = 0; i < families_.size(); ++i) {
        family_index_.emplace(families_[i].label, i);
        for (const auto& s : families_[i].subtypes) subtype_family_.emplace(s, i);
    }
}

size_t TaxonomyTree::leaf_count() const {
    size_t n = 0;
    for (const auto& f : families_) n += f.subtypes.size();
    return n;
}

bool TaxonomyTree::is_subtype(const std::string& label) const {
    return subtype_family_.contains(label);
}

const FamilyNode* TaxonomyTree::find_family_of(const std::string& subtype) const {
    auto it = subtype_family_.find(subtype);
    return it == subtype_family_.end() ? nullptr : &families_[it->second];
}

const FamilyNode* TaxonomyTree::find_family(const std::string& family_label) const {
    auto it = family_index_.find(family_label);
    return it == family_index_.end() ? nullptr : &families_[it->second];
}

bool TaxonomyTree::operator==(const TaxonomyTree& other) const {
    return root_label_ == other.root_label_ && benign_label_ == other.benign_label_ &&
           version_ == other.version_ && families_ == other.families_;
}

std::vector<std::string> validate(const TaxonomyTree& tree) {
    std::vector<std::string> violations;
    if (trim(tree.benign_label()).empty())
        violations.push_back("missing benign label");
    if (tree.families().empty())
        violations.push_back("no attack families");

    std::set<std::string> seen;
    seen.insert(tree.benign_label());
    auto check_unique = [&](const std::string& label, const char* role) {
        if (!seen.insert(label).second)
            violations.push_back("duplicate label '" + label + "' (" + role + ")");
    };
    for (const auto& fam : tree.families()) {
        if (trim(fam.label).empty())
            violations.push_back("family with empty label");
        check_unique(fam.label, "family");
        if (fam.subtypes.empty())
            violations.push_back("family '" + fam.label + "' has no subtypes");
        for (const auto& sub : fam.subtypes) {
            if (trim(sub).empty())
                violations.push_back("family '" + fam.label + "' has an empty subtype label");
            check_unique(sub, "subtype");
        }
    }
    return violations;
}

const std::string& family_of(const TaxonomyTree& tree, const std::string& subtype) {
    if (tree.is_benign(subtype)) return tree.benign_label();
    if (const FamilyNode* fam = tree.find_family_of(subtype)) return fam->label;
    throw ValidationError("unknown label '" + subtype + "'");
}

LeafPath leaf_path(const TaxonomyTree& tree, const std::string& leaf) {
    if (tree.is_benign(leaf))
        return LeafPath{Level1::benign, tree.benign_label(), tree.benign_label()};
    if (const FamilyNode* fam = tree.find_family_of(leaf))
        return LeafPath{Level1::attack, fam->label, leaf};
    if (tree.find_family(leaf))
        throw ValidationError("label '" + leaf + "' is a family, not a leaf");
    throw ValidationError("unknown label '" + leaf + "'");
}

TaxonomyTree parse_taxonomy(std::string_view spec_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(spec_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("taxonomy: malformed syntax: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("taxonomy: top-level value must be an object");

    static const std::set<std::string> known_keys = {"version", "root", "benign", "families"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known_keys.contains(it.key()))
            throw ParseError("taxonomy: unknown key '" + it.key() + "'");
    }
    auto require_string = [&](const char* key) -> std::string {
        if (!doc.contains(key)) throw ParseError(std::string("taxonomy: missing key '") + key + "'");
        if (!doc[key].is_string())
            throw ParseError(std::string("taxonomy: key '") + key + "' must be a string");
        return doc[key].get<std::string>();
    };
    std::string version = require_string("version");
    std::string benign = std::string(trim(require_string("benign")));
    std::string root = "traffic";
    if (doc.contains("root")) {
        if (!doc["root"].is_string()) throw ParseError("taxonomy: key 'root' must be a string");
        root = std::string(trim(doc["root"].get<std::string>()));
    }
    if (!doc.contains("families") || !doc["families"].is_object())
        throw ParseError("taxonomy: key 'families' must be an object");

    std::vector<FamilyNode> families;
    for (auto it = doc["families"].begin(); it != doc["families"].end(); ++it) {
        FamilyNode fam;
        fam.label = std::string(trim(it.key()));
        if (!it.value().is_array())
            throw ParseError("taxonomy: family '" + fam.label + "' must map to an array of subtypes");
        for (const auto& sub : it.value()) {
            if (!sub.is_string())
                throw ParseError("taxonomy: family '" + fam.label + "' contains a non-string subtype");
            fam.subtypes.push_back(std::string(trim(sub.get<std::string>())));
        }
        families.push_back(std::move(fam));
    }

    TaxonomyTree tree(std::move(benign), std::move(families), std::move(version), std::move(root));
    auto violations = validate(tree);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "taxonomy: invalid tree:";
        for (const auto& v : violations) msg << "\n  - " << v;
        throw ValidationError(msg.str());
    }
    return tree;
}

std::string serialize_taxonomy(const TaxonomyTree& tree) {
    ordered_json doc;
    doc["version"] = tree.version();
    doc["root"] = tree.root_label();
    doc["benign"] = tree.benign_label();
    ordered_json families = ordered_json::object();
    for (const auto& fam : tree.families()) families[fam.label] = fam.subtypes;
    doc["families"] = std::move(families);
    return doc.dump(2) + "\n";
}

TaxonomyTree load_taxonomy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open taxonomy file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_taxonomy(buf.str());
}

}  // namespace hicl
