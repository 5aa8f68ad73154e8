#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgex/csv.hpp"

namespace kgex {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

enum class EntityKind : std::uint8_t { IriNode, Literal };

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// (head, tail) packed into one key for the per-relation pair indexes.
inline std::uint64_t pair_key(EntityId head, EntityId tail) {
    return (static_cast<std::uint64_t>(head) << 32) | tail;
}
inline EntityId pair_head(std::uint64_t key) { return static_cast<EntityId>(key >> 32); }
inline EntityId pair_tail(std::uint64_t key) { return static_cast<EntityId>(key & 0xffffffffu); }

using PairSet = std::unordered_set<std::uint64_t>;

// Interned directed multigraph of (head, relation, tail) with duplicates
// collapsed. Ids are dense and assigned in first-appearance order, so
// building from the same input always yields the same handles. Immutable by
// convention once fully built; all readers may share it across threads.
class TripleSet {
public:
    TripleSet() = default;

    // Empty set sharing this set's entity/relation lexicons. Used by the
    // splitter and the merge step so ids stay comparable across sets.
    static TripleSet with_lexicons_of(const TripleSet& other);

    EntityId intern_entity(std::string_view iri, EntityKind kind = EntityKind::IriNode);
    RelationId intern_relation(std::string_view iri);

    // Returns false when the triple was already present (duplicate collapsed).
    bool add(EntityId head, RelationId relation, EntityId tail);
    bool add(std::string_view head, std::string_view relation, std::string_view tail);

    std::optional<EntityId> find_entity(std::string_view iri) const;
    std::optional<RelationId> find_relation(std::string_view iri) const;

    const std::string& entity_iri(EntityId id) const;
    EntityKind entity_kind(EntityId id) const;
    const std::string& relation_iri(RelationId id) const;

    std::size_t entity_count() const { return entity_iris_.size(); }
    std::size_t relation_count() const { return relation_iris_.size(); }
    std::size_t size() const { return triples_.size(); }

    bool contains(EntityId head, RelationId relation, EntityId tail) const;

    const std::vector<Triple>& triples() const { return triples_; }
    // Distinct (head, tail) pairs carrying `relation`.
    const PairSet& pairs(RelationId relation) const;

    struct Edge {
        RelationId relation;
        EntityId other;
    };
    const std::vector<Edge>& out_edges(EntityId head) const;
    const std::vector<Edge>& in_edges(EntityId tail) const;

    // Entity ids that occur in at least one triple of this set (heads or
    // tails), ascending. Splits share lexicons with their parent, so this
    // differs from entity_count() there.
    std::vector<EntityId> observed_entities() const;

    void write_csv(std::ostream& out, bool header = true) const;
    void write_csv(const std::filesystem::path& path, bool header = true) const;

private:
    std::vector<std::string> entity_iris_;
    std::vector<EntityKind> entity_kinds_;
    std::unordered_map<std::string, EntityId> entity_ids_;

    std::vector<std::string> relation_iris_;
    std::unordered_map<std::string, RelationId> relation_ids_;

    std::vector<Triple> triples_;
    std::vector<PairSet> pairs_by_relation_;
    std::vector<std::vector<Edge>> out_edges_;
    std::vector<std::vector<Edge>> in_edges_;

    static const PairSet empty_pairs_;
    static const std::vector<Edge> empty_edges_;
};

struct ParseResult {
    TripleSet set;
    std::uint64_t raw_records = 0;   // data records in the file
    std::uint64_t collapsed = 0;     // distinct triples kept
    bool had_header = false;
};

// Parses a from,rel,to CSV file. A first record equal to from,rel,to
// (case-insensitive) is treated as a header. Every other record must have
// exactly three fields.
ParseResult parse_triples(const std::filesystem::path& path, CsvDialect dialect = {});
ParseResult parse_triples(std::istream& in, CsvDialect dialect = {});

}  // namespace kgex
