#pragma once

// Shared fixtures for the test suites.

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "hicl/common.hpp"
#include "hicl/models.hpp"
#include "hicl/synth.hpp"

namespace testutil {

inline hicl::TaxonomyTree small_tree() {
    return hicl::TaxonomyTree(
        "normal",
        {{"DoS", {"smurf", "neptune"}}, {"Probe", {"satan", "nmap"}}, {"Theft", {"Keylogging"}}});
}

/// random valid taxonomy: 1-6 families, 1-5 subtypes each, unique labels
inline hicl::TaxonomyTree random_tree(hicl::Rng& rng) {
    const size_t n_families = 1 + rng.bounded(6);
    std::vector<hicl::FamilyNode> families;
    size_t label = 0;
    for (size_t f = 0; f < n_families; ++f) {
        hicl::FamilyNode fam;
        fam.label = "fam" + std::to_string(f);
        const size_t n_subtypes = 1 + rng.bounded(5);
        for (size_t s = 0; s < n_subtypes; ++s)
            fam.subtypes.push_back("sub" + std::to_string(label++));
        families.push_back(std::move(fam));
    }
    return hicl::TaxonomyTree("benign_traffic", std::move(families),
                              std::to_string(rng.bounded(100)));
}

inline hicl::FeatureMatrix matrix(size_t rows, size_t cols, std::vector<double> values) {
    hicl::FeatureMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.values = std::move(values);
    for (size_t c = 0; c < cols; ++c) m.feature_names.push_back("f" + std::to_string(c));
    return m;
}

inline std::string row_key(std::span<const double> row) {
    std::string key(row.size() * sizeof(double), '\0');
    std::memcpy(key.data(), row.data(), key.size());
    return key;
}

/// Learner stub that memorizes exact training rows; unseen rows get the
/// first class. Plugs into the models layer through the Fitter hook.
class MemorizingModel final : public hicl::Model {
public:
    MemorizingModel(std::vector<std::string> classes,
                    std::unordered_map<std::string, int> lookup)
        : lookup_(std::move(lookup)) {
        classes_ = std::move(classes);
    }
    hicl::Algorithm algorithm() const override { return hicl::Algorithm::dt; }
    std::vector<int> predict_ids(const hicl::FeatureMatrix& X, int) const override {
        std::vector<int> out(X.rows, 0);
        for (size_t r = 0; r < X.rows; ++r) {
            auto it = lookup_.find(row_key(X.row(r)));
            if (it != lookup_.end()) out[r] = it->second;
        }
        return out;
    }
    nlohmann::ordered_json params_to_json() const override { return {}; }

private:
    std::unordered_map<std::string, int> lookup_;
};

inline hicl::Fitter memorizing_fitter() {
    return [](const hicl::LearnerSpec&, const hicl::FeatureMatrix& X,
              std::span<const std::string> y, uint64_t, int) -> hicl::ModelPtr {
        auto enc = hicl::encode_labels(y);
        std::unordered_map<std::string, int> lookup;
        for (size_t r = 0; r < X.rows; ++r) lookup.emplace(row_key(X.row(r)), enc.ids[r]);
        return std::make_shared<MemorizingModel>(std::move(enc.classes), std::move(lookup));
    };
}

/// scratch directory removed on destruction
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("hicl_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// encoded synthetic dataset plus derived labels, all rows
struct SynthXY {
    hicl::FeatureMatrix X;
    hicl::LabelFrame labels;
};

inline SynthXY synth_xy(const hicl::TaxonomyTree& tree, size_t per_leaf, size_t dim,
                        double separation, double sigma, double benign_fraction, uint64_t seed) {
    hicl::SyntheticSpec spec;
    spec.taxonomy = tree;
    spec.per_leaf = per_leaf;
    spec.dim = dim;
    spec.separation = separation;
    spec.sigma = sigma;
    spec.benign_fraction = benign_fraction;
    spec.seed = seed;
    const hicl::SyntheticData data = hicl::generate_synthetic(spec);
    std::vector<size_t> all_rows(data.table.row_count);
    for (size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
    const hicl::Encoder enc = hicl::Encoder::fit(data.table, all_rows);
    return {enc.apply(data.table, all_rows), hicl::derive_labels(data.table, tree)};
}

/// balanced 2-class Gaussian blobs at the given center separation
struct Blobs {
    hicl::FeatureMatrix X;
    std::vector<std::string> y;
};

inline Blobs make_blobs(size_t per_class, size_t dim, double separation, double sigma,
                        hicl::Rng& rng) {
    Blobs blobs;
    blobs.X.rows = per_class * 2;
    blobs.X.cols = dim;
    for (size_t c = 0; c < dim; ++c) blobs.X.feature_names.push_back("f" + std::to_string(c));
    blobs.X.values.reserve(blobs.X.rows * dim);
    for (size_t cls = 0; cls < 2; ++cls) {
        const double center = cls == 0 ? 0.0 : separation;
        for (size_t i = 0; i < per_class; ++i) {
            for (size_t j = 0; j < dim; ++j)
                blobs.X.values.push_back(center + sigma * rng.normal());
            blobs.y.push_back(cls == 0 ? "A" : "B");
        }
    }
    return blobs;
}

}  // namespace testutil
