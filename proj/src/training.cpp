#include "kgex/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "kgex/error.hpp"

namespace kgex {
namespace {

struct Group {
    EntityId head;
    RelationId relation;
    std::vector<EntityId> tails;
};

std::vector<Group> group_queries(const TripleSet& train) {
    std::unordered_map<std::uint64_t, std::size_t> slots;
    std::vector<Group> groups;
    for (const Triple& t : train.triples()) {
        std::uint64_t key = (static_cast<std::uint64_t>(t.head) << 32) | t.relation;
        auto [it, fresh] = slots.emplace(key, groups.size());
        if (fresh) groups.push_back(Group{t.head, t.relation, {}});
        groups[it->second].tails.push_back(t.tail);
    }
    return groups;
}

Triple corrupt(const TripleSet& train, const Triple& positive, bool filtered,
               std::mt19937_64& rng) {
    int attempts = filtered ? 30 : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        Triple neg = positive;
        EntityId draw = static_cast<EntityId>(rng() % train.entity_count());
        (rng() & 1 ? neg.head : neg.tail) = draw;
        if (!filtered || (neg != positive && !train.contains(neg.head, neg.relation, neg.tail)))
            return neg;
    }
    Triple neg = positive;
    neg.tail = static_cast<EntityId>((positive.tail + 1) % train.entity_count());
    return neg;
}

void shuffle_indices(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
}

void apply_sgd(ModelParams& p, const GradientBuffer& g, double lr, double scale) {
    double step = lr * scale;
    for (std::size_t i = 0; i < p.entities.size(); ++i) p.entities[i] -= step * g.entities[i];
    for (std::size_t i = 0; i < p.relations.size(); ++i) p.relations[i] -= step * g.relations[i];
    for (std::size_t i = 0; i < p.core.size(); ++i) p.core[i] -= step * g.core[i];
}

struct Adam {
    std::vector<double> m, v;
    std::size_t step = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    explicit Adam(std::size_t size) : m(size, 0.0), v(size, 0.0) {}

    void update(double* params, const double* grads, std::size_t offset, std::size_t count,
                double lr, double scale, double bc1, double bc2) {
        for (std::size_t i = 0; i < count; ++i) {
            double g = grads[i] * scale;
            double& mi = m[offset + i];
            double& vi = v[offset + i];
            mi = beta1 * mi + (1.0 - beta1) * g;
            vi = beta2 * vi + (1.0 - beta2) * g * g;
            params[i] -= lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps);
        }
    }

    void apply(ModelParams& p, const GradientBuffer& g, double lr, double scale) {
        ++step;
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        std::size_t offset = 0;
        update(p.entities.data(), g.entities.data(), offset, p.entities.size(), lr, scale, bc1, bc2);
        offset += p.entities.size();
        update(p.relations.data(), g.relations.data(), offset, p.relations.size(), lr, scale, bc1,
               bc2);
        offset += p.relations.size();
        update(p.core.data(), g.core.data(), offset, p.core.size(), lr, scale, bc1, bc2);
    }
};

void finish_epoch(std::size_t epoch, double loss, TrainingResult& result,
                  const EpochCallback& on_epoch) {
    if (!std::isfinite(loss))
        throw TrainingError("training diverged at epoch " + std::to_string(epoch + 1));
    result.epoch_losses.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
}

void train_margin(const TripleSet& train, const EmbeddingConfig& config, TrainingResult& result,
                  const EpochCallback& on_epoch) {
    ModelParams& p = result.params;
    std::mt19937_64 rng(config.seed);
    const auto& triples = train.triples();
    std::vector<std::size_t> order(triples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    GradientBuffer grad;

    double lr = config.learning_rate;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.kind == ModelKind::TransE) normalize_entities(p);
        shuffle_indices(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t stop = std::min(order.size(), start + config.batch_size);
            grad.reset(p);
            std::size_t examples = 0;
            for (std::size_t i = start; i < stop; ++i) {
                const Triple& pos = triples[order[i]];
                for (std::size_t k = 0; k < config.negatives; ++k) {
                    Triple neg = corrupt(train, pos, config.filtered_negatives, rng);
                    epoch_loss += margin_ranking_loss(p, pos, neg, config.margin, &grad);
                    ++examples;
                }
            }
            apply_sgd(p, grad, lr, 1.0 / static_cast<double>(examples));
        }
        lr *= config.decay_rate;
        epoch_loss /= static_cast<double>(order.size() * config.negatives);
        finish_epoch(epoch, epoch_loss, result, on_epoch);
    }
}

void train_tucker(const TripleSet& train, const EmbeddingConfig& config, TrainingResult& result,
                  const EpochCallback& on_epoch) {
    ModelParams& p = result.params;
    std::mt19937_64 rng(config.seed);
    std::vector<Group> groups = group_queries(train);
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    GradientBuffer grad;
    Adam adam(p.entities.size() + p.relations.size() + p.core.size());

    double lr = config.learning_rate;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t stop = std::min(order.size(), start + config.batch_size);
            grad.reset(p);
            for (std::size_t i = start; i < stop; ++i) {
                const Group& g = groups[order[i]];
                epoch_loss += tucker_bce_loss(p, g.head, g.relation, g.tails,
                                              config.label_smoothing, config.dropout, &rng, &grad);
            }
            adam.apply(p, grad, lr, 1.0 / static_cast<double>(stop - start));
        }
        lr *= config.decay_rate;
        finish_epoch(epoch, epoch_loss / static_cast<double>(order.size()), result, on_epoch);
    }
}

void train_n3(const TripleSet& train, const EmbeddingConfig& config, TrainingResult& result,
              const EpochCallback& on_epoch) {
    ModelParams& p = result.params;
    std::mt19937_64 rng(config.seed);
    const auto& triples = train.triples();
    std::vector<std::size_t> order(triples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    GradientBuffer grad;
    Adam adam(p.entities.size() + p.relations.size());

    double lr = config.learning_rate;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t stop = std::min(order.size(), start + config.batch_size);
            grad.reset(p);
            for (std::size_t i = start; i < stop; ++i)
                epoch_loss += softmax_n3_loss(p, triples[order[i]], config.lambda_n3, &grad);
            adam.apply(p, grad, lr, 1.0 / static_cast<double>(stop - start));
        }
        lr *= config.decay_rate;
        finish_epoch(epoch, epoch_loss / static_cast<double>(order.size()), result, on_epoch);
    }
}

double probe_loss(const ModelParams& p, const EmbeddingConfig& config, const Triple& t,
                  const std::vector<EntityId>* tails, GradientBuffer* grad) {
    switch (config.kind) {
        case ModelKind::TransE:
        case ModelKind::DistMult:
        case ModelKind::ComplEx: {
            Triple neg = t;
            neg.tail = static_cast<EntityId>((t.tail + 1) % p.entity_count);
            return margin_ranking_loss(p, t, neg, config.margin, grad);
        }
        case ModelKind::ComplExN3:
            return softmax_n3_loss(p, t, config.lambda_n3, grad);
        case ModelKind::TuckER:
            return tucker_bce_loss(p, t.head, t.relation, *tails, config.label_smoothing,
                                   config.dropout, nullptr, grad);
    }
    return 0.0;
}

}  // namespace

TrainingResult train_model(const TripleSet& train, const EmbeddingConfig& config,
                           const EpochCallback& on_epoch) {
    config.validate();
    if (train.size() == 0) throw TrainingError("cannot train on an empty triple set");
    TrainingResult result;
    result.params = init_params(config, train.entity_count(), train.relation_count());
    switch (config.kind) {
        case ModelKind::TransE:
        case ModelKind::DistMult:
        case ModelKind::ComplEx:
            train_margin(train, config, result, on_epoch);
            break;
        case ModelKind::ComplExN3:
            train_n3(train, config, result, on_epoch);
            break;
        case ModelKind::TuckER:
            train_tucker(train, config, result, on_epoch);
            break;
    }
    return result;
}

GradientCheckReport gradient_check(const TripleSet& train, const EmbeddingConfig& config,
                                   std::size_t max_triples, double epsilon) {
    config.validate();
    if (!(epsilon > 0.0) || epsilon > 1e-2)
        throw ConfigError("gradient check epsilon must lie in (0, 1e-2]");
    if (train.size() == 0) throw TrainingError("gradient check needs at least one triple");
    ModelParams params = init_params(config, train.entity_count(), train.relation_count());

    std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_by_query;
    for (const Triple& t : train.triples())
        tails_by_query[(static_cast<std::uint64_t>(t.head) << 32) | t.relation].push_back(t.tail);

    GradientCheckReport report;
    GradientBuffer analytic;
    std::size_t probes = std::min(max_triples, train.triples().size());
    for (std::size_t i = 0; i < probes; ++i) {
        const Triple& t = train.triples()[i];
        const std::vector<EntityId>* tails = nullptr;
        if (config.kind == ModelKind::TuckER)
            tails = &tails_by_query[(static_cast<std::uint64_t>(t.head) << 32) | t.relation];

        analytic.reset(params);
        probe_loss(params, config, t, tails, &analytic);

        auto check_table = [&](std::vector<double>& table, const std::vector<double>& grads) {
            for (std::size_t j = 0; j < table.size(); ++j) {
                double saved = table[j];
                table[j] = saved + epsilon;
                double up = probe_loss(params, config, t, tails, nullptr);
                table[j] = saved - epsilon;
                double down = probe_loss(params, config, t, tails, nullptr);
                table[j] = saved;
                double numeric = (up - down) / (2.0 * epsilon);
                double deviation = std::abs(grads[j] - numeric) /
                                   std::max({std::abs(grads[j]), std::abs(numeric), 1e-3});
                report.max_relative_deviation =
                    std::max(report.max_relative_deviation, deviation);
                ++report.checked_parameters;
            }
        };
        check_table(params.entities, analytic.entities);
        check_table(params.relations, analytic.relations);
        check_table(params.core, analytic.core);
    }
    return report;
}

}  // namespace kgex
