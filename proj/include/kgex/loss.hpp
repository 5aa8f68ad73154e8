#pragma once

#include <random>
#include <span>
#include <vector>

#include "kgex/embedding.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

// Dense gradient accumulator shaped like a ModelParams instance.
struct GradientBuffer {
    std::vector<double> entities;
    std::vector<double> relations;
    std::vector<double> core;

    void reset(const ModelParams& params);
    std::span<double> entity(const ModelParams& params, EntityId id);
    std::span<double> relation(const ModelParams& params, RelationId id);
};

// Adds coeff * d(score)/d(theta) for every parameter the triple touches.
void accumulate_score_gradient(const ModelParams& params, const Triple& triple, double coeff,
                               GradientBuffer& grad);

// max(0, margin - score(pos) + score(neg)); gradients only when the margin
// is violated. grad may be null to evaluate the loss alone.
double margin_ranking_loss(const ModelParams& params, const Triple& positive,
                           const Triple& negative, double margin, GradientBuffer* grad);

// Cross entropy of the true tail against all-tail softmax plus the true head
// against all-head softmax, averaged, plus lambda times the cubed complex
// moduli of the three embedding rows involved.
double softmax_n3_loss(const ModelParams& params, const Triple& triple, double lambda,
                       GradientBuffer* grad);

// 1-N binary cross entropy for one (head, relation) query against every
// entity as tail, with smoothed labels yamended to (1 - ls) * y + ls / |E|.
// Dropout uses inverted scaling and is skipped when rng is null.
double tucker_bce_loss(const ModelParams& params, EntityId head, RelationId relation,
                       std::span<const EntityId> true_tails, double label_smoothing,
                       const DropoutRates& dropout, std::mt19937_64* rng, GradientBuffer* grad);

}  // namespace kgex
