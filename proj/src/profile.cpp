#include "kgex/profile.hpp"

#include <unordered_set>

namespace kgex {

const char* cardinality_name(Cardinality c) {
    switch (c) {
        case Cardinality::OneToOne: return "1-1";
        case Cardinality::OneToMany: return "1-n";
        case Cardinality::ManyToOne: return "n-1";
        case Cardinality::ManyToMany: return "n-n";
    }
    return "?";
}

Cardinality classify_cardinality(double tph, double hpt) {
    bool many_tails = tph >= kCardinalityThreshold;
    bool many_heads = hpt >= kCardinalityThreshold;
    if (!many_tails && !many_heads) return Cardinality::OneToOne;
    if (many_tails && !many_heads) return Cardinality::OneToMany;
    if (!many_tails && many_heads) return Cardinality::ManyToOne;
    return Cardinality::ManyToMany;
}

std::vector<RelationProfile> profile_relations(const TripleSet& set) {
    std::vector<RelationProfile> profiles;
    profiles.reserve(set.relation_count());
    for (RelationId r = 0; r < set.relation_count(); ++r) {
        const PairSet& pairs = set.pairs(r);
        std::unordered_set<EntityId> heads, tails;
        for (std::uint64_t key : pairs) {
            heads.insert(pair_head(key));
            tails.insert(pair_tail(key));
        }
        RelationProfile p;
        p.relation = r;
        p.triple_count = pairs.size();
        p.tph = heads.empty() ? 0.0 : static_cast<double>(pairs.size()) / heads.size();
        p.hpt = tails.empty() ? 0.0 : static_cast<double>(pairs.size()) / tails.size();
        p.cardinality = classify_cardinality(p.tph, p.hpt);
        profiles.push_back(p);
    }
    return profiles;
}

std::array<std::uint64_t, 4> cardinality_histogram(
    const std::vector<RelationProfile>& profiles) {
    std::array<std::uint64_t, 4> hist{0, 0, 0, 0};
    for (const auto& p : profiles) ++hist[static_cast<std::size_t>(p.cardinality)];
    return hist;
}

}  // namespace kgex
