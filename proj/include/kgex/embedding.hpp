#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kgex/config.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

enum class ModelKind { TransE, DistMult, ComplEx, ComplExN3, TuckER };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);  // ConfigError on unknown names

struct DropoutRates {
    double input = 0.0;
    double hidden1 = 0.0;
    double hidden2 = 0.0;
};

struct EmbeddingConfig {
    ModelKind kind = ModelKind::TransE;
    std::size_t entity_dim = 64;
    std::size_t relation_dim = 0;  // 0 means "same as entity_dim"
    double margin = 1.0;
    double learning_rate = 0.01;
    double decay_rate = 1.0;  // learning rate multiplier applied per epoch
    std::size_t epochs = 100;
    std::size_t batch_size = 128;
    std::size_t negatives = 1;
    // Resample corruptions that hit a known-true training triple. Off by
    // default: the uniform-corruption protocol tolerates the rare collision.
    bool filtered_negatives = false;
    double lambda_n3 = 0.0;
    double label_smoothing = 0.1;
    DropoutRates dropout;
    std::uint64_t seed = 0;

    std::size_t resolved_relation_dim() const;
    void validate() const;

    // Reads model, entity_dim, relation_dim, margin, learning_rate, epochs,
    // batch_size, negatives, lambda, label_smoothing, dropout_* and seed.
    static EmbeddingConfig from_config(const KeyValueConfig& config);
};

// Dense embedding tables. Scores are computed in double; checkpoints store
// float32 (see checkpoint.hpp).
struct ModelParams {
    ModelKind kind = ModelKind::TransE;
    std::size_t entity_dim = 0;
    std::size_t relation_dim = 0;
    std::size_t entity_count = 0;
    std::size_t relation_count = 0;
    std::uint64_t seed = 0;         // seed used for the initial draw
    std::vector<double> entities;   // entity_count x entity_dim, row major
    std::vector<double> relations;  // relation_count x relation_dim, row major
    std::vector<double> core;       // TuckER: relation_dim x entity_dim x entity_dim

    std::span<const double> entity(EntityId id) const;
    std::span<double> entity(EntityId id);
    std::span<const double> relation(RelationId id) const;
    std::span<double> relation(RelationId id);
    // Core slice W[a][b][0..entity_dim) for TuckER.
    std::span<const double> core_row(std::size_t a, std::size_t b) const;
};

// Seeded uniform init in [-0.5/sqrt(dim), 0.5/sqrt(dim)) per table, with a
// fixed draw order (entities, relations, core) so results are reproducible.
ModelParams init_params(const EmbeddingConfig& config, std::size_t entity_count,
                        std::size_t relation_count);

// Plausibility score of a triple, higher is more plausible.
//   TransE:    -||h + r - t||_2
//   DistMult:  sum_i h_i r_i t_i
//   ComplEx:   Re<h, r, conj(t)>, rows split as [real half | imag half]
//   TuckER:    sum_{a,b,c} W[a][b][c] r_a h_b t_c
double score(const ModelParams& params, const Triple& triple);

// Vectorised scoring over every entity as tail (or head). out must have
// entity_count slots; out[e] equals score() of the corresponding triple.
void score_all_tails(const ModelParams& params, EntityId head, RelationId relation,
                     std::span<double> out);
void score_all_heads(const ModelParams& params, RelationId relation, EntityId tail,
                     std::span<double> out);

// Rescales every entity row to unit L2 norm (TransE applies this each epoch).
void normalize_entities(ModelParams& params);

}  // namespace kgex
