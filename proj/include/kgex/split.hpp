#pragma once

#include <cstdint>
#include <filesystem>

#include "kgex/triple_set.hpp"

namespace kgex {

struct SplitRatios {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;

    void validate() const;  // positive-or-zero entries summing to 1
};

// Train/valid/test partition sharing the parent set's lexicons, so entity
// and relation ids are comparable across the three sets.
struct DatasetSplit {
    TripleSet train;
    TripleSet valid;
    TripleSet test;
    std::uint64_t seed = 0;
    SplitRatios ratios;
};

// Seeded shuffle-and-partition with closure repair: any valid/test triple
// whose entity or relation never occurs in train is swapped into train and a
// safe replacement drawn, keeping split sizes within 1% of the requested
// ratios. Throws when the dataset is too small to satisfy closure at the
// requested ratios.
DatasetSplit split_dataset(const TripleSet& set, SplitRatios ratios, std::uint64_t seed);

// Loads pre-split files against a shared lexicon built from their union.
DatasetSplit load_split(const std::filesystem::path& train, const std::filesystem::path& valid,
                        const std::filesystem::path& test);

}  // namespace kgex
