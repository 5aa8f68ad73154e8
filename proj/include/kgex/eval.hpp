#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgex/embedding.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

enum class EvalSetting { Raw, Filtered };

std::string_view eval_setting_name(EvalSetting setting);

// True-triple index over any number of splits, used to drop known answers
// from the candidate list in the filtered setting.
class FilterIndex {
public:
    void add(const TripleSet& part);

    bool known_tail(EntityId head, RelationId relation, EntityId tail) const;
    bool known_head(EntityId head, RelationId relation, EntityId tail) const;

private:
    std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_;
    std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_;
};

struct RankingMetrics {
    double mean_rank = 0.0;
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    std::uint64_t queries = 0;
};

struct EvalOptions {
    EvalSetting setting = EvalSetting::Filtered;
    std::size_t threads = 1;
};

// Which side of the triple is hidden and re-ranked.
enum class QueryDirection { Tail, Head };

// Rank of the true answer among `pool` candidates for one query. Tied scores
// receive the mid rank: higher + 1 + tied / 2. Pass a filter to drop other
// known answers (the target itself is never dropped).
double rank_triple(const ModelParams& params, const Triple& triple, QueryDirection direction,
                   std::span<const EntityId> pool, const FilterIndex* filter = nullptr);

// Link prediction over both directions of every test triple. Candidates are
// the entities observed in `candidates_from` (normally the training split).
// Tied scores receive the mid rank: higher + 1 + tied / 2. The filtered
// setting drops other known answers from the pool but never the target.
// Per-query ranks are stored then reduced in a fixed order, so results do
// not depend on the thread count.
RankingMetrics evaluate(const ModelParams& params, const TripleSet& test,
                        const TripleSet& candidates_from, const FilterIndex* filter,
                        const EvalOptions& options = {});

struct MetricsRow {
    std::string model;
    std::string dataset;
    std::string setting;
    RankingMetrics metrics;
};

// model,dataset,setting,MR,MRR,Hits@1,Hits@3,Hits@10
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

}  // namespace kgex
