#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "hicl/taxonomy.hpp"

using namespace hicl;

TEST_CASE("parse builds a queryable tree") {
    const std::string text = R"({
      "version": "1",
      "benign": "normal",
      "families": {
        "DDoS": ["DDoS_TCP", "DDoS_UDP", "DDoS_HTTP"],
        "DoS": ["DoS_TCP", "DoS_UDP", "DoS_HTTP"],
        "Reconnaissance": ["Service_Scan", "OS_Fingerprint"],
        "Theft": ["Keylogging", "Data Exfiltration"]
      }
    })";
    const TaxonomyTree tree = parse_taxonomy(text);
    CHECK(tree.families().size() == 4);
    CHECK(tree.leaf_count() == 10);
    CHECK(family_of(tree, "Keylogging") == "Theft");
    CHECK(family_of(tree, "normal") == "normal");
    CHECK_THROWS_AS(family_of(tree, "nosuch"), ValidationError);
}

TEST_CASE("parse rejects degenerate and broken specs") {
    CHECK_THROWS_WITH_AS(
        parse_taxonomy(R"({"version":"1","benign":"normal","families":{}})"),
        doctest::Contains("no attack families"), ValidationError);
    CHECK_THROWS_WITH_AS(
        parse_taxonomy(
            R"({"version":"1","benign":"n","families":{"A":["UDP"],"B":["UDP"]}})"),
        doctest::Contains("duplicate label"), ValidationError);
    CHECK_THROWS_AS(parse_taxonomy("{not json"), ParseError);
    CHECK_THROWS_AS(parse_taxonomy(R"({"benign":"n","families":{"A":["x"]}})"), ParseError);
    CHECK_THROWS_AS(
        parse_taxonomy(R"({"version":"1","benign":"n","families":{"A":["x"]},"bogus":1})"),
        ParseError);
}

TEST_CASE("leaf_path resolves all three levels") {
    const TaxonomyTree tree = testutil::small_tree();
    const LeafPath smurf = leaf_path(tree, "smurf");
    CHECK(smurf.level1 == Level1::attack);
    CHECK(smurf.level2 == "DoS");
    CHECK(smurf.level3 == "smurf");

    const LeafPath benign = leaf_path(tree, "normal");
    CHECK(benign.level1 == Level1::benign);
    CHECK(benign.level2 == "normal");
    CHECK(benign.level3 == "normal");

    // families are not leaves
    CHECK_THROWS_WITH_AS(leaf_path(tree, "DoS"), doctest::Contains("family"), ValidationError);
    CHECK_THROWS_AS(leaf_path(tree, "unknown"), ValidationError);
}

TEST_CASE("validate reports violations instead of throwing") {
    TaxonomyTree empty_family("normal", {{"X", {}}});
    auto violations = validate(empty_family);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "family 'X' has no subtypes");

    TaxonomyTree dup("normal", {{"A", {"s", "s"}}});
    violations = validate(dup);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("duplicate label 's'") != std::string::npos);

    CHECK(validate(testutil::small_tree()).empty());
}

TEST_CASE("leaf_path agrees with family_of for every leaf") {
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const TaxonomyTree tree = testutil::random_tree(rng);
        size_t leaves = 0;
        for (const auto& fam : tree.families()) {
            for (const auto& sub : fam.subtypes) {
                const LeafPath path = leaf_path(tree, sub);
                CHECK(path.level2 == family_of(tree, sub));
                CHECK(path.level3 == sub);
                ++leaves;
            }
        }
        CHECK(leaves == tree.leaf_count());
    }
}

TEST_CASE("serialize/parse round-trip over random trees") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const TaxonomyTree tree = testutil::random_tree(rng);
        const std::string text = serialize_taxonomy(tree);
        const TaxonomyTree reparsed = parse_taxonomy(text);
        CHECK(reparsed == tree);
        // serializing again yields identical bytes
        CHECK(serialize_taxonomy(reparsed) == text);
    }
}

TEST_CASE("bundled taxonomy specs round-trip bit-exactly") {
    const std::filesystem::path dir = std::filesystem::path(HICL_DATA_DIR) / "taxonomies";
    size_t checked = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        const std::string bytes = testutil::read_file(entry.path().string());
        const TaxonomyTree tree = parse_taxonomy(bytes);
        CHECK(validate(tree).empty());
        CHECK(serialize_taxonomy(tree) == bytes);
        ++checked;
    }
    CHECK(checked == 11);
}

TEST_CASE("bundled trees match the published dataset structures") {
    const std::filesystem::path dir = std::filesystem::path(HICL_DATA_DIR) / "taxonomies";
    const TaxonomyTree nsl = load_taxonomy((dir / "nsl_kdd.json").string());
    CHECK(nsl.families().size() == 4);
    CHECK(nsl.leaf_count() == 39);
    CHECK(family_of(nsl, "smurf") == "DoS");
    CHECK(family_of(nsl, "satan") == "Probe");
    CHECK(family_of(nsl, "buffer_overflow") == "U2R");

    const TaxonomyTree unsw = load_taxonomy((dir / "unsw_nb15.json").string());
    CHECK(family_of(unsw, "Exploits") == "Exploitation");
    CHECK(family_of(unsw, "Shellcode") == "Exploitation");

    const TaxonomyTree ddos = load_taxonomy((dir / "cic_ddos2019.json").string());
    CHECK(family_of(ddos, "DrDoS_DNS") == "R_TCP/UDP");
    CHECK(family_of(ddos, "DrDoS_NTP") == "R_UDP");

    const TaxonomyTree bot = load_taxonomy((dir / "bot_iot.json").string());
    CHECK(bot.families().size() == 4);
    CHECK(bot.leaf_count() == 10);
    CHECK(family_of(bot, "Keylogging") == "Theft");
}
