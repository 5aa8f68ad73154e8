#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kgex/embedding.hpp"
#include "kgex/loss.hpp"
#include "kgex/triple_set.hpp"

namespace kgex {

struct TrainingResult {
    ModelParams params;
    std::vector<double> epoch_losses;  // mean loss per epoch, in order
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Trains config.kind on the given triples. Margin models run SGD over
// corrupted negatives (TransE renormalises entity rows each epoch); TuckER
// runs 1-N binary cross entropy over (head, relation) groups with Adam;
// complex-n3 runs full-softmax cross entropy with N3 regularisation and
// Adam. Deterministic for a fixed config (single threaded, seeded rng).
// Zero epochs returns the initial parameters. Throws TrainingError when the
// epoch loss stops being finite.
TrainingResult train_model(const TripleSet& train, const EmbeddingConfig& config,
                           const EpochCallback& on_epoch = {});

struct GradientCheckReport {
    double max_relative_deviation = 0.0;
    std::size_t checked_parameters = 0;

    bool passed(double tolerance = 1e-4) const { return max_relative_deviation < tolerance; }
};

// Compares analytic loss gradients against central finite differences for
// the model's own training loss (regularisation and label smoothing
// included, dropout off). Negatives for margin models corrupt the tail to
// (tail + 1) mod |E| so the probe is deterministic. Deviations are relative
// to max(|analytic|, |numeric|, 1e-3).
GradientCheckReport gradient_check(const TripleSet& train, const EmbeddingConfig& config,
                                   std::size_t max_triples = 4, double epsilon = 1e-5);

}  // namespace kgex
