#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hicl {

/// An attack family and its subtypes (the leaves routed through it).
struct FamilyNode {
    std::string label;
    std::vector<std::string> subtypes;

    bool operator==(const FamilyNode&) const = default;
};

/// Level-1 outcome: benign traffic or some attack.
enum class Level1 : uint8_t { benign, attack };

std::string_view to_string(Level1 v);

/// The resolved (level1, level2, level3) path of a leaf label.
struct LeafPath {
    Level1 level1;
    std::string level2;
    std::string level3;

    bool operator==(const LeafPath&) const = default;
};

/// Three-level label hierarchy: one benign leaf plus attack families with
/// subtype leaves. Immutable after construction; safe to share across
/// threads. Construction never validates so that `validate` can inspect
/// broken trees; `parse_taxonomy` rejects invalid ones.
class TaxonomyTree {
public:
    TaxonomyTree() = default;
    TaxonomyTree(std::string benign_label, std::vector<FamilyNode> families,
                 std::string version = "1", std::string root_label = "traffic");

    const std::string& root_label() const { return root_label_; }
    const std::string& benign_label() const { return benign_label_; }
    const std::string& version() const { return version_; }
    const std::vector<FamilyNode>& families() const { return families_; }

    /// Number of subtype leaves (the benign leaf not included).
    size_t leaf_count() const;

    bool is_benign(const std::string& label) const { return label == benign_label_; }
    bool is_subtype(const std::string& label) const;

    /// Family owning a subtype; nullptr for unknown labels and for the
    /// benign label.
    const FamilyNode* find_family_of(const std::string& subtype) const;

    const FamilyNode* find_family(const std::string& family_label) const;

    bool operator==(const TaxonomyTree& other) const;

private:
    std::string root_label_ = "traffic";
    std::string benign_label_;
    std::vector<FamilyNode> families_;
    std::string version_ = "1";
    // subtype -> index into families_; first occurrence wins on (invalid)
    // duplicate labels.
    std::unordered_map<std::string, size_t> subtype_family_;
    std::unordered_map<std::string, size_t> family_index_;
};

/// Parses the JSON taxonomy document and validates it.
/// Throws ParseError on malformed syntax, ValidationError when the tree
/// breaks an invariant (the message lists every violation).
TaxonomyTree parse_taxonomy(std::string_view spec_text);

/// Canonical JSON text; parse_taxonomy(serialize_taxonomy(t)) == t, and the
/// bundled spec files round-trip bit-exactly.
std::string serialize_taxonomy(const TaxonomyTree& tree);

TaxonomyTree load_taxonomy(const std::string& path);

/// All invariant violations, one human-readable line each; empty when the
/// tree is valid.
std::vector<std::string> validate(const TaxonomyTree& tree);

/// Owning family of a subtype leaf; the benign label maps to itself.
/// Throws ValidationError for unknown labels.
const std::string& family_of(const TaxonomyTree& tree, const std::string& subtype);

/// Resolves a leaf (benign label or subtype) into its three-level path.
/// Throws ValidationError for unknown labels, including family labels.
LeafPath leaf_path(const TaxonomyTree& tree, const std::string& leaf);

/// Level-1 class labels used for the root classifier and level-1 reports.
inline const std::string kBenignClass = "benign";
inline const std::string kAttackClass = "attack";

inline const std::string& level1_class(Level1 v) {
    return v == Level1::benign ? kBenignClass : kAttackClass;
}

}  // namespace hicl
