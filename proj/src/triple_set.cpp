#include "kgex/triple_set.hpp"

#include <fstream>
#include <ostream>

#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {

const PairSet TripleSet::empty_pairs_{};
const std::vector<TripleSet::Edge> TripleSet::empty_edges_{};

TripleSet TripleSet::with_lexicons_of(const TripleSet& other) {
    TripleSet set;
    set.entity_iris_ = other.entity_iris_;
    set.entity_kinds_ = other.entity_kinds_;
    set.entity_ids_ = other.entity_ids_;
    set.relation_iris_ = other.relation_iris_;
    set.relation_ids_ = other.relation_ids_;
    return set;
}

EntityId TripleSet::intern_entity(std::string_view iri, EntityKind kind) {
    auto it = entity_ids_.find(std::string(iri));
    if (it != entity_ids_.end()) return it->second;
    EntityId id = static_cast<EntityId>(entity_iris_.size());
    entity_iris_.emplace_back(iri);
    entity_kinds_.push_back(kind);
    entity_ids_.emplace(entity_iris_.back(), id);
    return id;
}

RelationId TripleSet::intern_relation(std::string_view iri) {
    auto it = relation_ids_.find(std::string(iri));
    if (it != relation_ids_.end()) return it->second;
    RelationId id = static_cast<RelationId>(relation_iris_.size());
    relation_iris_.emplace_back(iri);
    relation_ids_.emplace(relation_iris_.back(), id);
    return id;
}

bool TripleSet::add(EntityId head, RelationId relation, EntityId tail) {
    if (head >= entity_iris_.size() || tail >= entity_iris_.size())
        throw Error("entity id out of range");
    if (relation >= relation_iris_.size()) throw Error("relation id out of range");

    if (pairs_by_relation_.size() < relation_iris_.size())
        pairs_by_relation_.resize(relation_iris_.size());
    if (!pairs_by_relation_[relation].insert(pair_key(head, tail)).second) return false;

    triples_.push_back({head, relation, tail});
    if (out_edges_.size() < entity_iris_.size()) out_edges_.resize(entity_iris_.size());
    if (in_edges_.size() < entity_iris_.size()) in_edges_.resize(entity_iris_.size());
    out_edges_[head].push_back({relation, tail});
    in_edges_[tail].push_back({relation, head});
    return true;
}

bool TripleSet::add(std::string_view head, std::string_view relation, std::string_view tail) {
    EntityId h = intern_entity(head);
    RelationId r = intern_relation(relation);
    EntityId t = intern_entity(tail);
    return add(h, r, t);
}

std::optional<EntityId> TripleSet::find_entity(std::string_view iri) const {
    auto it = entity_ids_.find(std::string(iri));
    if (it == entity_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<RelationId> TripleSet::find_relation(std::string_view iri) const {
    auto it = relation_ids_.find(std::string(iri));
    if (it == relation_ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& TripleSet::entity_iri(EntityId id) const {
    if (id >= entity_iris_.size()) throw Error("entity id out of range");
    return entity_iris_[id];
}

EntityKind TripleSet::entity_kind(EntityId id) const {
    if (id >= entity_kinds_.size()) throw Error("entity id out of range");
    return entity_kinds_[id];
}

const std::string& TripleSet::relation_iri(RelationId id) const {
    if (id >= relation_iris_.size()) throw Error("relation id out of range");
    return relation_iris_[id];
}

bool TripleSet::contains(EntityId head, RelationId relation, EntityId tail) const {
    if (relation >= pairs_by_relation_.size()) return false;
    return pairs_by_relation_[relation].count(pair_key(head, tail)) > 0;
}

const PairSet& TripleSet::pairs(RelationId relation) const {
    if (relation >= relation_iris_.size()) throw Error("relation id out of range");
    if (relation >= pairs_by_relation_.size()) return empty_pairs_;
    return pairs_by_relation_[relation];
}

const std::vector<TripleSet::Edge>& TripleSet::out_edges(EntityId head) const {
    if (head >= entity_iris_.size()) throw Error("entity id out of range");
    if (head >= out_edges_.size()) return empty_edges_;
    return out_edges_[head];
}

const std::vector<TripleSet::Edge>& TripleSet::in_edges(EntityId tail) const {
    if (tail >= entity_iris_.size()) throw Error("entity id out of range");
    if (tail >= in_edges_.size()) return empty_edges_;
    return in_edges_[tail];
}

std::vector<EntityId> TripleSet::observed_entities() const {
    std::vector<bool> seen(entity_iris_.size(), false);
    for (const Triple& t : triples_) {
        seen[t.head] = true;
        seen[t.tail] = true;
    }
    std::vector<EntityId> out;
    for (EntityId id = 0; id < seen.size(); ++id)
        if (seen[id]) out.push_back(id);
    return out;
}

void TripleSet::write_csv(std::ostream& out, bool header) const {
    CsvWriter writer(out);
    if (header) writer.write_record({"from", "rel", "to"});
    for (const Triple& t : triples_)
        writer.write_record({entity_iri(t.head), relation_iri(t.relation), entity_iri(t.tail)});
}

void TripleSet::write_csv(const std::filesystem::path& path, bool header) const {
    auto out = open_output(path);
    write_csv(out, header);
}

ParseResult parse_triples(const std::filesystem::path& path, CsvDialect dialect) {
    auto in = open_input(path);
    return parse_triples(in, dialect);
}

ParseResult parse_triples(std::istream& in, CsvDialect dialect) {
    ParseResult result;
    CsvReader reader(in, dialect);
    std::vector<std::string> fields;
    bool first = true;
    while (reader.read_record(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() == 1 && !fields[0].empty() && fields[0][0] == '#')
            continue;  // metadata comment, e.g. "# seed=42"
        if (fields.size() != 3)
            throw ParseError("expected 3 fields, got " + std::to_string(fields.size()),
                             reader.record_line());
        if (first) {
            first = false;
            if (to_lower(trim(fields[0])) == "from" && to_lower(trim(fields[1])) == "rel" &&
                to_lower(trim(fields[2])) == "to") {
                result.had_header = true;
                continue;
            }
        }
        ++result.raw_records;
        if (result.set.add(fields[0], fields[1], fields[2])) ++result.collapsed;
    }
    return result;
}

}  // namespace kgex
