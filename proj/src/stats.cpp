#include "kgex/stats.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "kgex/csv.hpp"

namespace kgex {

GraphStats compute_stats(const TripleSet& set, std::span<const RelationId> shared_relations) {
    GraphStats stats;
    stats.triple_count = set.size();
    stats.relation_count = set.relation_count();

    std::vector<bool> as_subject(set.entity_count(), false);
    std::vector<bool> as_object(set.entity_count(), false);
    for (const Triple& t : set.triples()) {
        as_subject[t.head] = true;
        as_object[t.tail] = true;
    }
    for (std::size_t i = 0; i < set.entity_count(); ++i) {
        if (as_subject[i]) ++stats.subject_entity_count;
        if (as_object[i]) ++stats.object_entity_count;
        if (as_subject[i] || as_object[i]) ++stats.distinct_entity_count;
        if (as_subject[i] && as_object[i]) ++stats.both_positions_count;
    }
    stats.subject_object_sum = stats.subject_entity_count + stats.object_entity_count;

    stats.relation_frequencies.reserve(set.relation_count());
    for (RelationId r = 0; r < set.relation_count(); ++r)
        stats.relation_frequencies.emplace_back(r, set.pairs(r).size());
    std::sort(stats.relation_frequencies.begin(), stats.relation_frequencies.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });

    for (RelationId r : shared_relations) {
        // Heads grouped by tail; a head "shares" the relation when some tail
        // of its connects at least two distinct heads.
        std::unordered_map<EntityId, std::unordered_set<EntityId>> heads_by_tail;
        for (std::uint64_t key : set.pairs(r))
            heads_by_tail[pair_tail(key)].insert(pair_head(key));
        std::unordered_set<EntityId> sharing;
        for (const auto& [tail, heads] : heads_by_tail)
            if (heads.size() >= 2) sharing.insert(heads.begin(), heads.end());
        stats.shared_tail_entity_counts[r] = sharing.size();
    }
    return stats;
}

void write_stats_text(std::ostream& out, const GraphStats& stats, const TripleSet& set,
                      const Lexicon* lexicon) {
    out << "triples                         " << stats.triple_count << "\n";
    out << "entities as subject             " << stats.subject_entity_count << "\n";
    out << "entities as object              " << stats.object_entity_count << "\n";
    out << "distinct entities               " << stats.distinct_entity_count << "\n";
    out << "subject+object sum              " << stats.subject_object_sum << "\n";
    out << "entities in both positions      " << stats.both_positions_count << "\n";
    out << "relations                       " << stats.relation_count << "\n";
    for (const auto& [r, count] : stats.shared_tail_entity_counts) {
        std::string name = lexicon ? lexicon->relation_display(set, r) : set.relation_iri(r);
        out << "entities sharing at least one " << name << "  " << count << "\n";
    }
    out << "\ntop relations by frequency:\n";
    std::size_t shown = 0;
    for (const auto& [r, count] : stats.relation_frequencies) {
        if (shown++ >= 25) break;
        std::string name = lexicon ? lexicon->relation_display(set, r) : set.relation_iri(r);
        out << "  " << set.relation_iri(r) << "  " << name << "  " << count << "\n";
    }
}

void write_stats_csv(std::ostream& out, const GraphStats& stats, const TripleSet& set) {
    CsvWriter writer(out);
    writer.write_record({"metric", "value"});
    writer.write_record({"triples", std::to_string(stats.triple_count)});
    writer.write_record({"subject_entities", std::to_string(stats.subject_entity_count)});
    writer.write_record({"object_entities", std::to_string(stats.object_entity_count)});
    writer.write_record({"distinct_entities", std::to_string(stats.distinct_entity_count)});
    writer.write_record({"subject_object_sum", std::to_string(stats.subject_object_sum)});
    writer.write_record({"both_positions", std::to_string(stats.both_positions_count)});
    writer.write_record({"relations", std::to_string(stats.relation_count)});
    for (const auto& [r, count] : stats.shared_tail_entity_counts)
        writer.write_record({"sharing:" + set.relation_iri(r), std::to_string(count)});
    for (const auto& [r, count] : stats.relation_frequencies)
        writer.write_record({"freq:" + set.relation_iri(r), std::to_string(count)});
}

}  // namespace kgex
