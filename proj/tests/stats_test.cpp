#include <sstream>

#include "doctest.h"
#include "kgex/stats.hpp"
#include "kgex/triple_set.hpp"
#include "support.hpp"

using namespace kgex;

// Frozen counts for tests/fixtures/joconde_sample.csv, audited with an
// independent line-by-line tally of the file.
namespace {
constexpr std::uint64_t kRawRecords = 1000;
constexpr std::uint64_t kCollapsed = 990;
constexpr std::uint64_t kRelations = 15;
constexpr std::uint64_t kSubjects = 223;
constexpr std::uint64_t kObjects = 255;
constexpr std::uint64_t kBothPositions = 69;
constexpr std::uint64_t kDistinctEntities = 409;
}  // namespace

TEST_CASE("sample dataset reproduces its audited counts") {
    ParseResult parsed = parse_triples(test::fixture("joconde_sample.csv"));
    CHECK(parsed.had_header);
    CHECK(parsed.raw_records == kRawRecords);
    CHECK(parsed.collapsed == kCollapsed);

    GraphStats stats = compute_stats(parsed.set);
    CHECK(stats.triple_count == kCollapsed);
    CHECK(stats.relation_count == kRelations);
    CHECK(stats.subject_entity_count == kSubjects);
    CHECK(stats.object_entity_count == kObjects);
    CHECK(stats.both_positions_count == kBothPositions);
    CHECK(stats.distinct_entity_count == kDistinctEntities);
    CHECK(stats.subject_object_sum == kSubjects + kObjects);
}

TEST_CASE("entity count bounds hold on random graphs") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 25; ++round) {
        TripleSet set = test::random_graph(rng, 500);
        GraphStats stats = compute_stats(set);
        CHECK(stats.both_positions_count <=
              std::min(stats.subject_entity_count, stats.object_entity_count));
        CHECK(stats.distinct_entity_count <= stats.subject_object_sum);
        CHECK(stats.distinct_entity_count ==
              stats.subject_object_sum - stats.both_positions_count);
        CHECK(stats.triple_count == set.size());
    }
}

TEST_CASE("stats over disjoint-entity unions add component-wise") {
    TripleSet a;
    a.add("urn:a1", "urn:p", "urn:a2");
    a.add("urn:a2", "urn:q", "urn:a3");
    TripleSet b;
    b.add("urn:b1", "urn:p", "urn:b2");

    TripleSet both;
    for (const TripleSet* part : {&a, &b})
        for (const Triple& t : part->triples())
            both.add(part->entity_iri(t.head), part->relation_iri(t.relation),
                     part->entity_iri(t.tail));

    GraphStats sa = compute_stats(a);
    GraphStats sb = compute_stats(b);
    GraphStats su = compute_stats(both);
    CHECK(su.triple_count == sa.triple_count + sb.triple_count);
    CHECK(su.distinct_entity_count == sa.distinct_entity_count + sb.distinct_entity_count);
    CHECK(su.subject_entity_count == sa.subject_entity_count + sb.subject_entity_count);
}

TEST_CASE("relation frequencies sort by count descending") {
    TripleSet set;
    set.add("urn:a", "urn:rare", "urn:b");
    for (int i = 0; i < 5; ++i)
        set.add("urn:h" + std::to_string(i), "urn:common", "urn:t" + std::to_string(i));
    GraphStats stats = compute_stats(set);
    REQUIRE(stats.relation_frequencies.size() == 2);
    CHECK(stats.relation_frequencies[0].second == 5);
    CHECK(stats.relation_frequencies[1].second == 1);
}

TEST_CASE("shared-tail counts find co-depicting heads") {
    TripleSet set;
    set.add("urn:w1", "urn:depicts", "urn:horse");
    set.add("urn:w2", "urn:depicts", "urn:horse");
    set.add("urn:w3", "urn:depicts", "urn:tree");
    RelationId depicts = *set.find_relation("urn:depicts");
    GraphStats stats = compute_stats(set, std::vector<RelationId>{depicts});
    REQUIRE(stats.shared_tail_entity_counts.count(depicts));
    CHECK(stats.shared_tail_entity_counts.at(depicts) == 2);
}

TEST_CASE("stats writers emit both entity-count definitions") {
    ParseResult parsed = parse_triples(test::fixture("joconde_sample.csv"));
    GraphStats stats = compute_stats(parsed.set);
    std::ostringstream text, csv;
    write_stats_text(text, stats, parsed.set, nullptr);
    write_stats_csv(csv, stats, parsed.set);
    CHECK(text.str().find(std::to_string(kDistinctEntities)) != std::string::npos);
    CHECK(text.str().find(std::to_string(kSubjects + kObjects)) != std::string::npos);
    CHECK(csv.str().find("triple_count") != std::string::npos);
}
