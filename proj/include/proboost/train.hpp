#pragma once

#include <cstddef>
#include <vector>

#include "proboost/dataset.hpp"
#include "proboost/learner.hpp"
#include "proboost/optimizer.hpp"
#include "proboost/prng.hpp"

namespace proboost {

struct TrainConfig {
    std::size_t batch_size = 16;
    std::size_t max_epochs = 300;
    std::size_t patience = 10;
    double validation_fraction = 0.30;
    double learning_rate = 1e-3;
    std::size_t elbo_mc_samples = 1;  // posterior draws per mini-batch (vi)
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;  // 1-based index of the restored epoch
};

/// Mini-batch training with a seeded stratified validation split and early
/// stopping: stops when validation loss fails to improve for `patience`
/// consecutive epochs, then restores the best-epoch parameters. Validation
/// loss is unweighted cross-entropy on the deterministic forward pass.
TrainHistory train(WeakLearner& learner, const Dataset& data, const TrainConfig& cfg,
                   PrngStream& stream);

/// The seeded stratified split used by train(): per class, a seeded
/// permutation assigns floor(count * validation_fraction) samples to
/// validation. Exposed for tests.
void stratified_validation_split(const Dataset& data, double validation_fraction,
                                 PrngStream& stream,
                                 std::vector<std::size_t>& train_indices,
                                 std::vector<std::size_t>& val_indices);

}  // namespace proboost
