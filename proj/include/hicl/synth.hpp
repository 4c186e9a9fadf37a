#pragma once

#include <string>

#include "hicl/dataset.hpp"

namespace hicl {

/// Family-coherent Gaussian clusters: leaf centers within a family sit
/// closer together than centers across families, which in turn sit closer
/// than any attack center to the benign cluster. `separation` scales all
/// center distances; 0 collapses everything onto the benign center.
struct SyntheticSpec {
    TaxonomyTree taxonomy;
    size_t per_leaf = 100;      // samples per attack subtype
    size_t dim = 4;             // numeric feature count
    double separation = 3.0;
    double sigma = 1.0;         // per-dimension noise
    double benign_fraction = 0.3;  // benign share of the generated rows
    uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    DataTable table;
    DatasetSchema schema;
};

/// Deterministic per seed. Benign rows come first, then subtypes in
/// taxonomy order.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// CSV bytes of the generated table (deterministic, shortest round-trip
/// float formatting).
std::string synthetic_to_csv(const SyntheticData& data);

}  // namespace hicl
