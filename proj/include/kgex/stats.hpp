#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kgex/lexicon.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

// Basic counts over a triple set. Entity counting is reported under every
// candidate definition because published summaries disagree on which one
// they use: distinct nodes (union of positions) vs the subject+object sum.
struct GraphStats {
    std::uint64_t triple_count = 0;
    std::uint64_t distinct_entity_count = 0;   // |subjects ∪ objects|
    std::uint64_t subject_entity_count = 0;
    std::uint64_t object_entity_count = 0;
    std::uint64_t both_positions_count = 0;    // |subjects ∩ objects|
    std::uint64_t subject_object_sum = 0;      // subject_count + object_count
    std::uint64_t relation_count = 0;

    // (relation, triple count), sorted by count descending, ties by id.
    std::vector<std::pair<RelationId, std::uint64_t>> relation_frequencies;

    // relation id -> number of head entities that share at least one tail
    // under that relation with some other head entity.
    std::map<RelationId, std::uint64_t> shared_tail_entity_counts;
};

GraphStats compute_stats(const TripleSet& set,
                         std::span<const RelationId> shared_relations = {});

void write_stats_text(std::ostream& out, const GraphStats& stats, const TripleSet& set,
                      const Lexicon* lexicon = nullptr);
void write_stats_csv(std::ostream& out, const GraphStats& stats, const TripleSet& set);

}  // namespace kgex
