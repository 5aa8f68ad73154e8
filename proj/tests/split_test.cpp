#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "kgex/error.hpp"
#include "kgex/split.hpp"
#include "support.hpp"

using namespace kgex;
using kgex::test::random_graph;

namespace {

using Key = std::tuple<std::string, std::string, std::string>;

std::set<Key> keyed(const TripleSet& set) {
    std::set<Key> out;
    for (const Triple& t : set.triples())
        out.emplace(set.entity_iri(t.head), set.relation_iri(t.relation), set.entity_iri(t.tail));
    return out;
}

TripleSet sized_graph(std::mt19937_64& rng, std::size_t triples) {
    TripleSet set;
    std::uniform_int_distribution<int> ent(0, static_cast<int>(2 + triples / 4));
    std::uniform_int_distribution<int> rel(0, static_cast<int>(1 + triples / 40));
    while (set.size() < triples)
        set.add(kgex::test::entity_name(ent(rng)), kgex::test::relation_name(rel(rng)),
                kgex::test::entity_name(ent(rng)));
    return set;
}

}  // namespace

TEST_CASE("split parts are disjoint and union to the parent") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        TripleSet set = sized_graph(rng, 400);
        auto split = split_dataset(set, SplitRatios{}, 1000 + trial);

        auto train = keyed(split.train), valid = keyed(split.valid), test = keyed(split.test);
        CHECK(train.size() + valid.size() + test.size() == set.size());

        std::set<Key> all = train;
        all.insert(valid.begin(), valid.end());
        all.insert(test.begin(), test.end());
        CHECK(all == keyed(set));

        for (const Key& k : valid) CHECK(train.count(k) == 0);
        for (const Key& k : test) {
            CHECK(train.count(k) == 0);
            CHECK(valid.count(k) == 0);
        }
    }
}

TEST_CASE("split sizes stay within one percent of the ratios") {
    std::mt19937_64 rng(12);
    TripleSet set = sized_graph(rng, 1000);
    SplitRatios ratios{0.7, 0.2, 0.1};
    auto split = split_dataset(set, ratios, 4);
    double n = static_cast<double>(set.size());
    CHECK(std::abs(split.train.size() / n - ratios.train) <= 0.01 + 1e-12);
    CHECK(std::abs(split.valid.size() / n - ratios.valid) <= 0.01 + 1e-12);
    CHECK(std::abs(split.test.size() / n - ratios.test) <= 0.01 + 1e-12);
}

TEST_CASE("valid and test entities and relations all occur in train") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        TripleSet set = sized_graph(rng, 300);
        auto split = split_dataset(set, SplitRatios{}, 77 + trial);

        std::set<EntityId> train_entities;
        std::set<RelationId> train_relations;
        for (const Triple& t : split.train.triples()) {
            train_entities.insert(t.head);
            train_entities.insert(t.tail);
            train_relations.insert(t.relation);
        }
        for (const TripleSet* part : {&split.valid, &split.test}) {
            for (const Triple& t : part->triples()) {
                CHECK(train_entities.count(t.head) == 1);
                CHECK(train_entities.count(t.tail) == 1);
                CHECK(train_relations.count(t.relation) == 1);
            }
        }
    }
}

TEST_CASE("split parts share the parent lexicon") {
    std::mt19937_64 rng(14);
    TripleSet set = sized_graph(rng, 200);
    auto split = split_dataset(set, SplitRatios{}, 5);
    for (const TripleSet* part : {&split.train, &split.valid, &split.test}) {
        CHECK(part->entity_count() == set.entity_count());
        CHECK(part->relation_count() == set.relation_count());
        for (const Triple& t : part->triples()) {
            CHECK(part->entity_iri(t.head) == set.entity_iri(t.head));
            CHECK(part->relation_iri(t.relation) == set.relation_iri(t.relation));
        }
    }
}

TEST_CASE("same seed reproduces the split, different seed moves triples") {
    std::mt19937_64 rng(15);
    TripleSet set = sized_graph(rng, 500);
    auto a = split_dataset(set, SplitRatios{}, 42);
    auto b = split_dataset(set, SplitRatios{}, 42);
    CHECK(keyed(a.train) == keyed(b.train));
    CHECK(keyed(a.valid) == keyed(b.valid));
    CHECK(keyed(a.test) == keyed(b.test));

    auto c = split_dataset(set, SplitRatios{}, 43);
    CHECK(keyed(a.test) != keyed(c.test));
}

TEST_CASE("ratio validation rejects bad inputs") {
    CHECK_THROWS_AS(split_dataset(TripleSet{}, SplitRatios{}, 0), ConfigError);

    SplitRatios negative{1.2, -0.1, -0.1};
    CHECK_THROWS_AS(negative.validate(), ConfigError);

    SplitRatios off_sum{0.5, 0.2, 0.2};
    CHECK_THROWS_AS(off_sum.validate(), ConfigError);

    SplitRatios train_only{1.0, 0.0, 0.0};
    CHECK_NOTHROW(train_only.validate());
}

TEST_CASE("tiny datasets that cannot satisfy the ratios throw") {
    TripleSet set;
    set.add("urn:e/a", "urn:r/p", "urn:e/b");
    set.add("urn:e/b", "urn:r/p", "urn:e/c");
    set.add("urn:e/c", "urn:r/p", "urn:e/a");
    CHECK_THROWS_AS(split_dataset(set, SplitRatios{}, 1), ConfigError);
}

TEST_CASE("train-only ratios put everything in train") {
    std::mt19937_64 rng(16);
    TripleSet set = sized_graph(rng, 120);
    auto split = split_dataset(set, SplitRatios{1.0, 0.0, 0.0}, 9);
    CHECK(split.train.size() == set.size());
    CHECK(split.valid.size() == 0);
    CHECK(split.test.size() == 0);
}
