#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kgex/triple_set.hpp"

namespace kgex {

enum class Cardinality { OneToOne, OneToMany, ManyToOne, ManyToMany };

const char* cardinality_name(Cardinality c);

// Classification threshold on tph/hpt.
inline constexpr double kCardinalityThreshold = 1.5;

// tph < 1.5 and hpt < 1.5 -> 1-1; tph >= 1.5 only -> 1-n; hpt >= 1.5 only
// -> n-1; both -> n-n.
Cardinality classify_cardinality(double tph, double hpt);

struct RelationProfile {
    RelationId relation;
    std::uint64_t triple_count;  // distinct (head, tail) pairs
    double tph;                  // pair count / distinct heads
    double hpt;                  // pair count / distinct tails
    Cardinality cardinality;
};

std::vector<RelationProfile> profile_relations(const TripleSet& set);

// Counts per class in enum order (1-1, 1-n, n-1, n-n).
std::array<std::uint64_t, 4> cardinality_histogram(const std::vector<RelationProfile>& profiles);

}  // namespace kgex
