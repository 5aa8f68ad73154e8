#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "kgex/embedding.hpp"
#include "kgex/split.hpp"
#include "kgex/triple_set.hpp"

namespace kgex::test {

// Link prediction benchmark drawn from a hidden low-rank generator: a small
// random multiplicative model scores every (head, relation) pair and the
// top-k tails become ground truth. The structure is exactly representable by
// a fresh model of the same family, so recovery quality separates model
// classes without shipping a large dataset.
inline TripleSet synthetic_graph(std::size_t entities, std::size_t relations, std::size_t top_k,
                                 std::uint64_t seed) {
    EmbeddingConfig generator;
    generator.kind = ModelKind::TuckER;
    generator.entity_dim = 8;
    generator.relation_dim = 4;
    generator.seed = seed;
    ModelParams hidden = init_params(generator, entities, relations);

    TripleSet set;
    std::vector<double> scores(entities);
    std::vector<EntityId> order(entities);
    auto entity = [](EntityId e) { return "urn:syn/e" + std::to_string(e); };
    auto relation = [](RelationId r) { return "urn:syn/r" + std::to_string(r); };
    for (RelationId r = 0; r < relations; ++r) {
        for (EntityId h = 0; h < entities; ++h) {
            score_all_tails(hidden, h, r, scores);
            std::iota(order.begin(), order.end(), EntityId{0});
            std::partial_sort(order.begin(), order.begin() + static_cast<long>(top_k),
                              order.end(), [&](EntityId a, EntityId b) {
                                  if (scores[a] != scores[b]) return scores[a] > scores[b];
                                  return a < b;
                              });
            for (std::size_t k = 0; k < top_k; ++k)
                set.add(entity(h), relation(r), entity(order[k]));
        }
    }
    return set;
}

inline DatasetSplit synthetic_benchmark(std::uint64_t seed) {
    TripleSet graph = synthetic_graph(500, 10, 4, seed);
    return split_dataset(graph, SplitRatios{0.9, 0.05, 0.05}, seed);
}

}  // namespace kgex::test
