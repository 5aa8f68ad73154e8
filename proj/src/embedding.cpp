#include "kgex/embedding.hpp"

#include <cmath>
#include <random>
#include <string>

#include "kgex/error.hpp"

namespace kgex {
namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_uniform(std::vector<double>& table, std::size_t dim, std::mt19937_64& rng) {
    double bound = 0.5 / std::sqrt(static_cast<double>(dim));
    for (double& x : table) x = (2.0 * uniform01(rng) - 1.0) * bound;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

// Collapses the TuckER core against the relation row and one entity row,
// leaving a vector to dot with candidate rows. head_side selects which
// entity axis is bound: true binds axis b (scoring tails), false binds
// axis c (scoring heads).
std::vector<double> tucker_fold(const ModelParams& p, RelationId relation, EntityId bound,
                                bool head_side) {
    std::span<const double> r = p.relation(relation);
    std::span<const double> e = p.entity(bound);
    std::vector<double> out(p.entity_dim, 0.0);
    for (std::size_t a = 0; a < p.relation_dim; ++a) {
        if (r[a] == 0.0) continue;
        for (std::size_t b = 0; b < p.entity_dim; ++b) {
            std::span<const double> w = p.core_row(a, b);
            if (head_side) {
                double scale = r[a] * e[b];
                if (scale == 0.0) continue;
                for (std::size_t c = 0; c < p.entity_dim; ++c) out[c] += scale * w[c];
            } else {
                out[b] += r[a] * dot(w, e);
            }
        }
    }
    return out;
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::TransE: return "transe";
        case ModelKind::DistMult: return "distmult";
        case ModelKind::ComplEx: return "complex";
        case ModelKind::ComplExN3: return "complex-n3";
        case ModelKind::TuckER: return "tucker";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    for (ModelKind kind : {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx,
                           ModelKind::ComplExN3, ModelKind::TuckER}) {
        if (name == model_kind_name(kind)) return kind;
    }
    throw ConfigError("unknown model kind: " + std::string(name));
}

std::size_t EmbeddingConfig::resolved_relation_dim() const {
    return relation_dim == 0 ? entity_dim : relation_dim;
}

void EmbeddingConfig::validate() const {
    if (entity_dim == 0) throw ConfigError("entity_dim must be positive");
    if ((kind == ModelKind::ComplEx || kind == ModelKind::ComplExN3) && entity_dim % 2 != 0)
        throw ConfigError("complex models need an even entity_dim");
    if (kind != ModelKind::TuckER && resolved_relation_dim() != entity_dim)
        throw ConfigError("relation_dim must match entity_dim for this model");
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (decay_rate <= 0.0) throw ConfigError("decay_rate must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (negatives == 0) throw ConfigError("negatives must be positive");
    if (margin < 0.0) throw ConfigError("margin must be non-negative");
    if (lambda_n3 < 0.0) throw ConfigError("lambda must be non-negative");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0)
        throw ConfigError("label_smoothing must lie in [0, 1)");
    for (double rate : {dropout.input, dropout.hidden1, dropout.hidden2})
        if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rates must lie in [0, 1)");
}

EmbeddingConfig EmbeddingConfig::from_config(const KeyValueConfig& config) {
    EmbeddingConfig out;
    out.kind = parse_model_kind(config.get_or("model", "transe"));
    out.entity_dim = static_cast<std::size_t>(config.get_int("entity_dim", 64));
    out.relation_dim = static_cast<std::size_t>(config.get_int("relation_dim", 0));
    out.margin = config.get_double("margin", 1.0);
    out.learning_rate = config.get_double("learning_rate", 0.01);
    out.decay_rate = config.get_double("decay_rate", 1.0);
    out.epochs = static_cast<std::size_t>(config.get_int("epochs", 100));
    out.batch_size = static_cast<std::size_t>(config.get_int("batch_size", 128));
    out.negatives = static_cast<std::size_t>(config.get_int("negatives", 1));
    out.filtered_negatives = config.get_bool("filtered_negatives", false);
    out.lambda_n3 = config.get_double("lambda", 0.0);
    out.label_smoothing = config.get_double("label_smoothing", 0.1);
    out.dropout.input = config.get_double("dropout_input", 0.0);
    out.dropout.hidden1 = config.get_double("dropout_hidden1", 0.0);
    out.dropout.hidden2 = config.get_double("dropout_hidden2", 0.0);
    out.seed = static_cast<std::uint64_t>(config.get_int("seed", 0));
    out.validate();
    return out;
}

std::span<const double> ModelParams::entity(EntityId id) const {
    return {entities.data() + static_cast<std::size_t>(id) * entity_dim, entity_dim};
}

std::span<double> ModelParams::entity(EntityId id) {
    return {entities.data() + static_cast<std::size_t>(id) * entity_dim, entity_dim};
}

std::span<const double> ModelParams::relation(RelationId id) const {
    return {relations.data() + static_cast<std::size_t>(id) * relation_dim, relation_dim};
}

std::span<double> ModelParams::relation(RelationId id) {
    return {relations.data() + static_cast<std::size_t>(id) * relation_dim, relation_dim};
}

std::span<const double> ModelParams::core_row(std::size_t a, std::size_t b) const {
    return {core.data() + (a * entity_dim + b) * entity_dim, entity_dim};
}

ModelParams init_params(const EmbeddingConfig& config, std::size_t entity_count,
                        std::size_t relation_count) {
    config.validate();
    ModelParams p;
    p.kind = config.kind;
    p.entity_dim = config.entity_dim;
    p.relation_dim = config.resolved_relation_dim();
    p.entity_count = entity_count;
    p.relation_count = relation_count;
    p.seed = config.seed;
    p.entities.resize(entity_count * p.entity_dim);
    p.relations.resize(relation_count * p.relation_dim);
    if (config.kind == ModelKind::TuckER)
        p.core.resize(p.relation_dim * p.entity_dim * p.entity_dim);

    std::mt19937_64 rng(config.seed);
    fill_uniform(p.entities, p.entity_dim, rng);
    fill_uniform(p.relations, p.relation_dim, rng);
    if (!p.core.empty()) fill_uniform(p.core, p.entity_dim, rng);
    return p;
}

double score(const ModelParams& p, const Triple& t) {
    std::span<const double> h = p.entity(t.head);
    std::span<const double> r = p.relation(t.relation);
    std::span<const double> o = p.entity(t.tail);
    switch (p.kind) {
        case ModelKind::TransE: {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.entity_dim; ++i) {
                double d = h[i] + r[i] - o[i];
                sum += d * d;
            }
            return -std::sqrt(sum);
        }
        case ModelKind::DistMult: {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.entity_dim; ++i) sum += h[i] * r[i] * o[i];
            return sum;
        }
        case ModelKind::ComplEx:
        case ModelKind::ComplExN3: {
            std::size_t half = p.entity_dim / 2;
            double sum = 0.0;
            for (std::size_t i = 0; i < half; ++i) {
                double hr = h[i], hi = h[half + i];
                double rr = r[i], ri = r[half + i];
                double tr = o[i], ti = o[half + i];
                sum += hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr;
            }
            return sum;
        }
        case ModelKind::TuckER: {
            std::vector<double> folded = tucker_fold(p, t.relation, t.head, true);
            return dot(folded, o);
        }
    }
    return 0.0;
}

void score_all_tails(const ModelParams& p, EntityId head, RelationId relation,
                     std::span<double> out) {
    std::span<const double> h = p.entity(head);
    std::span<const double> r = p.relation(relation);
    std::vector<double> w(p.entity_dim);
    bool negate_distance = false;
    switch (p.kind) {
        case ModelKind::TransE:
            for (std::size_t i = 0; i < p.entity_dim; ++i) w[i] = h[i] + r[i];
            negate_distance = true;
            break;
        case ModelKind::DistMult:
            for (std::size_t i = 0; i < p.entity_dim; ++i) w[i] = h[i] * r[i];
            break;
        case ModelKind::ComplEx:
        case ModelKind::ComplExN3: {
            std::size_t half = p.entity_dim / 2;
            for (std::size_t i = 0; i < half; ++i) {
                w[i] = h[i] * r[i] - h[half + i] * r[half + i];
                w[half + i] = h[i] * r[half + i] + h[half + i] * r[i];
            }
            break;
        }
        case ModelKind::TuckER:
            w = tucker_fold(p, relation, head, true);
            break;
    }
    for (std::size_t e = 0; e < p.entity_count; ++e) {
        std::span<const double> row = p.entity(static_cast<EntityId>(e));
        if (negate_distance) {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.entity_dim; ++i) {
                double d = w[i] - row[i];
                sum += d * d;
            }
            out[e] = -std::sqrt(sum);
        } else {
            out[e] = dot(w, row);
        }
    }
}

void score_all_heads(const ModelParams& p, RelationId relation, EntityId tail,
                     std::span<double> out) {
    std::span<const double> r = p.relation(relation);
    std::span<const double> t = p.entity(tail);
    std::vector<double> w(p.entity_dim);
    bool negate_distance = false;
    switch (p.kind) {
        case ModelKind::TransE:
            for (std::size_t i = 0; i < p.entity_dim; ++i) w[i] = t[i] - r[i];
            negate_distance = true;
            break;
        case ModelKind::DistMult:
            for (std::size_t i = 0; i < p.entity_dim; ++i) w[i] = r[i] * t[i];
            break;
        case ModelKind::ComplEx:
        case ModelKind::ComplExN3: {
            std::size_t half = p.entity_dim / 2;
            for (std::size_t i = 0; i < half; ++i) {
                w[i] = r[i] * t[i] + r[half + i] * t[half + i];
                w[half + i] = r[i] * t[half + i] - r[half + i] * t[i];
            }
            break;
        }
        case ModelKind::TuckER:
            w = tucker_fold(p, relation, tail, false);
            break;
    }
    for (std::size_t e = 0; e < p.entity_count; ++e) {
        std::span<const double> row = p.entity(static_cast<EntityId>(e));
        if (negate_distance) {
            double sum = 0.0;
            for (std::size_t i = 0; i < p.entity_dim; ++i) {
                double d = row[i] - w[i];
                sum += d * d;
            }
            out[e] = -std::sqrt(sum);
        } else {
            out[e] = dot(w, row);
        }
    }
}

void normalize_entities(ModelParams& p) {
    for (std::size_t e = 0; e < p.entity_count; ++e) {
        std::span<double> row = p.entity(static_cast<EntityId>(e));
        double norm = std::sqrt(dot(row, row));
        if (norm == 0.0) continue;
        for (double& x : row) x /= norm;
    }
}

}  // namespace kgex
