#include "kgex/split.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "kgex/error.hpp"

namespace kgex {
namespace {

void fisher_yates(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

TripleSet reintern(const TripleSet& source, const TripleSet& base) {
    TripleSet out = TripleSet::with_lexicons_of(base);
    for (const Triple& t : source.triples()) {
        EntityId h = out.intern_entity(source.entity_iri(t.head), source.entity_kind(t.head));
        RelationId r = out.intern_relation(source.relation_iri(t.relation));
        EntityId o = out.intern_entity(source.entity_iri(t.tail), source.entity_kind(t.tail));
        out.add(h, r, o);
    }
    return out;
}

}  // namespace

void SplitRatios::validate() const {
    if (train < 0.0 || valid < 0.0 || test < 0.0)
        throw ConfigError("split ratios must be non-negative");
    double sum = train + valid + test;
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
}

DatasetSplit split_dataset(const TripleSet& set, SplitRatios ratios, std::uint64_t seed) {
    ratios.validate();
    const auto& triples = set.triples();
    const std::size_t n = triples.size();
    if (n == 0) throw ConfigError("cannot split an empty triple set");

    auto n_valid = static_cast<std::size_t>(std::llround(ratios.valid * static_cast<double>(n)));
    auto n_test = static_cast<std::size_t>(std::llround(ratios.test * static_cast<double>(n)));
    if (n_valid + n_test > n) throw ConfigError("dataset too small for the requested split ratios");
    const std::size_t n_train = n - n_valid - n_test;

    auto check_tolerance = [&](std::size_t count, double ratio, const char* name) {
        double got = static_cast<double>(count) / static_cast<double>(n);
        if (std::abs(got - ratio) > 0.01 + 1e-12)
            throw ConfigError(std::string("dataset too small to hit the ") + name +
                              " ratio within 1%");
    };
    check_tolerance(n_train, ratios.train, "train");
    check_tolerance(n_valid, ratios.valid, "valid");
    check_tolerance(n_test, ratios.test, "test");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    fisher_yates(order, rng);

    // Slots [0, n_train) hold train triples; the rest are held out.
    std::vector<std::uint32_t> entity_uses(set.entity_count(), 0);
    std::vector<std::uint32_t> relation_uses(set.relation_count(), 0);
    auto bump = [&](const Triple& t, std::int32_t delta) {
        entity_uses[t.head] += static_cast<std::uint32_t>(delta);
        relation_uses[t.relation] += static_cast<std::uint32_t>(delta);
        entity_uses[t.tail] += static_cast<std::uint32_t>(delta);
    };
    for (std::size_t i = 0; i < n_train; ++i) bump(triples[order[i]], 1);

    auto covered = [&](const Triple& t) {
        return entity_uses[t.head] > 0 && relation_uses[t.relation] > 0 && entity_uses[t.tail] > 0;
    };
    auto spare = [&](const Triple& t) {
        return entity_uses[t.head] > 1 && relation_uses[t.relation] > 1 && entity_uses[t.tail] > 1;
    };

    // Closure repair: swap each uncovered held-out triple with a train triple
    // every element of which stays represented after the exchange.
    std::size_t cursor = 0;
    for (std::size_t i = n_train; i < n; ++i) {
        const Triple& incoming = triples[order[i]];
        if (covered(incoming)) continue;
        bump(incoming, 1);
        bool swapped = false;
        for (std::size_t step = 0; step < n_train; ++step) {
            std::size_t j = (cursor + step) % n_train;
            const Triple& outgoing = triples[order[j]];
            if (!spare(outgoing)) continue;
            bump(outgoing, -1);
            std::swap(order[i], order[j]);
            cursor = (j + 1) % n_train;
            swapped = true;
            break;
        }
        if (!swapped) throw ConfigError("dataset too small to satisfy split closure");
    }

    DatasetSplit split;
    split.seed = seed;
    split.ratios = ratios;
    split.train = TripleSet::with_lexicons_of(set);
    split.valid = TripleSet::with_lexicons_of(set);
    split.test = TripleSet::with_lexicons_of(set);
    for (std::size_t i = 0; i < n; ++i) {
        TripleSet& part = i < n_train ? split.train : i < n_train + n_valid ? split.valid : split.test;
        const Triple& t = triples[order[i]];
        part.add(t.head, t.relation, t.tail);
    }
    return split;
}

DatasetSplit load_split(const std::filesystem::path& train, const std::filesystem::path& valid,
                        const std::filesystem::path& test) {
    TripleSet train_raw = parse_triples(train).set;
    TripleSet valid_raw = parse_triples(valid).set;
    TripleSet test_raw = parse_triples(test).set;

    TripleSet base;
    for (const TripleSet* part : {&train_raw, &valid_raw, &test_raw}) {
        for (const Triple& t : part->triples()) {
            base.intern_entity(part->entity_iri(t.head), part->entity_kind(t.head));
            base.intern_relation(part->relation_iri(t.relation));
            base.intern_entity(part->entity_iri(t.tail), part->entity_kind(t.tail));
        }
    }

    DatasetSplit split;
    split.train = reintern(train_raw, base);
    split.valid = reintern(valid_raw, base);
    split.test = reintern(test_raw, base);
    return split;
}

}  // namespace kgex
