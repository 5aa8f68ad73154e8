#include "kgex/eval.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {
namespace {

std::uint64_t tail_key(EntityId head, RelationId relation) {
    return (static_cast<std::uint64_t>(head) << 32) | relation;
}

std::uint64_t head_key(RelationId relation, EntityId tail) {
    return (static_cast<std::uint64_t>(relation) << 32) | tail;
}

bool sorted_contains(const std::vector<EntityId>& values, EntityId value) {
    return std::binary_search(values.begin(), values.end(), value);
}

double rank_one(const ModelParams& params, const Triple& t, QueryDirection direction,
                std::span<const EntityId> pool, const FilterIndex* filter,
                std::vector<double>& scores) {
    EntityId target;
    if (direction == QueryDirection::Tail) {
        score_all_tails(params, t.head, t.relation, scores);
        target = t.tail;
    } else {
        score_all_heads(params, t.relation, t.tail, scores);
        target = t.head;
    }
    auto excluded = [&](EntityId c) {
        if (filter == nullptr) return false;
        return direction == QueryDirection::Tail ? filter->known_tail(t.head, t.relation, c)
                                                 : filter->known_head(c, t.relation, t.tail);
    };
    double target_score = scores[target];
    std::uint64_t higher = 0, tied = 0;
    for (EntityId c : pool) {
        if (c == target || excluded(c)) continue;
        if (scores[c] > target_score)
            ++higher;
        else if (scores[c] == target_score)
            ++tied;
    }
    return static_cast<double>(higher) + 1.0 + static_cast<double>(tied) / 2.0;
}

}  // namespace

std::string_view eval_setting_name(EvalSetting setting) {
    return setting == EvalSetting::Raw ? "raw" : "filtered";
}

void FilterIndex::add(const TripleSet& part) {
    for (const Triple& t : part.triples()) {
        tails_[tail_key(t.head, t.relation)].push_back(t.tail);
        heads_[head_key(t.relation, t.tail)].push_back(t.head);
    }
    for (auto* index : {&tails_, &heads_}) {
        for (auto& [key, values] : *index) {
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
        }
    }
}

bool FilterIndex::known_tail(EntityId head, RelationId relation, EntityId tail) const {
    auto it = tails_.find(tail_key(head, relation));
    return it != tails_.end() && sorted_contains(it->second, tail);
}

bool FilterIndex::known_head(EntityId head, RelationId relation, EntityId tail) const {
    auto it = heads_.find(head_key(relation, tail));
    return it != heads_.end() && sorted_contains(it->second, head);
}

double rank_triple(const ModelParams& params, const Triple& triple, QueryDirection direction,
                   std::span<const EntityId> pool, const FilterIndex* filter) {
    std::vector<double> scores(params.entity_count);
    return rank_one(params, triple, direction, pool, filter, scores);
}

RankingMetrics evaluate(const ModelParams& params, const TripleSet& test,
                        const TripleSet& candidates_from, const FilterIndex* filter,
                        const EvalOptions& options) {
    if (options.setting == EvalSetting::Filtered && filter == nullptr)
        throw ConfigError("filtered evaluation needs a filter index");
    const FilterIndex* active = options.setting == EvalSetting::Filtered ? filter : nullptr;
    const std::vector<EntityId> pool = candidates_from.observed_entities();
    const auto& triples = test.triples();
    std::vector<double> ranks(triples.size() * 2, 0.0);

    auto worker = [&](std::size_t begin, std::size_t end) {
        std::vector<double> scores(params.entity_count);
        for (std::size_t i = begin; i < end; ++i) {
            const Triple& t = triples[i];
            ranks[2 * i] = rank_one(params, t, QueryDirection::Tail, pool, active, scores);
            ranks[2 * i + 1] = rank_one(params, t, QueryDirection::Head, pool, active, scores);
        }
    };

    std::size_t threads = std::max<std::size_t>(1, options.threads);
    if (threads == 1 || triples.size() < 2 * threads) {
        worker(0, triples.size());
    } else {
        std::vector<std::thread> crew;
        std::size_t chunk = (triples.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(triples.size(), begin + chunk);
            if (begin >= end) break;
            crew.emplace_back(worker, begin, end);
        }
        for (std::thread& th : crew) th.join();
    }

    RankingMetrics metrics;
    metrics.queries = ranks.size();
    for (double rank : ranks) {
        metrics.mean_rank += rank;
        metrics.mrr += 1.0 / rank;
        metrics.hits1 += rank <= 1.0 ? 1.0 : 0.0;
        metrics.hits3 += rank <= 3.0 ? 1.0 : 0.0;
        metrics.hits10 += rank <= 10.0 ? 1.0 : 0.0;
    }
    if (!ranks.empty()) {
        double n = static_cast<double>(ranks.size());
        metrics.mean_rank /= n;
        metrics.mrr /= n;
        metrics.hits1 /= n;
        metrics.hits3 /= n;
        metrics.hits10 /= n;
    }
    return metrics;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
    out << "model,dataset,setting,MR,MRR,Hits@1,Hits@3,Hits@10\n";
    for (const MetricsRow& row : rows) {
        out << row.model << ',' << row.dataset << ',' << row.setting << ','
            << format_double(row.metrics.mean_rank, 2) << ',' << format_double(row.metrics.mrr, 4)
            << ',' << format_double(row.metrics.hits1, 4) << ','
            << format_double(row.metrics.hits3, 4) << ',' << format_double(row.metrics.hits10, 4)
            << '\n';
    }
}

}  // namespace kgex
