#include "proboost/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proboost/errors.hpp"
#include "proboost/losses.hpp"
#include "proboost/numerics.hpp"

namespace proboost {

void stratified_validation_split(const Dataset& data, double validation_fraction,
                                 PrngStream& stream,
                                 std::vector<std::size_t>& train_indices,
                                 std::vector<std::size_t>& val_indices) {
    train_indices.clear();
    val_indices.clear();
    std::vector<std::vector<std::size_t>> by_class(
        static_cast<std::size_t>(data.n_classes));
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);
    }
    for (auto& pool : by_class) {
        if (pool.empty()) continue;
        const auto order = permutation(stream, pool.size());
        const std::size_t n_val = static_cast<std::size_t>(
            std::floor(static_cast<double>(pool.size()) * validation_fraction));
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (i < n_val) val_indices.push_back(pool[order[i]]);
            else train_indices.push_back(pool[order[i]]);
        }
    }
    std::sort(train_indices.begin(), train_indices.end());
    std::sort(val_indices.begin(), val_indices.end());
}

TrainHistory train(WeakLearner& learner, const Dataset& data, const TrainConfig& cfg,
                   PrngStream& stream) {
    if (cfg.batch_size < 1) throw InvalidParameter("train: batch_size must be >= 1");
    if (cfg.patience < 1) throw InvalidParameter("train: patience must be >= 1");
    if (cfg.validation_fraction <= 0.0 || cfg.validation_fraction >= 1.0) {
        throw InvalidParameter("train: validation_fraction must be in (0, 1)");
    }
    if (cfg.max_epochs < 1) throw InvalidParameter("train: max_epochs must be >= 1");
    if (data.size() == 0) throw DataError("train: empty dataset");

    std::vector<std::size_t> train_idx, val_idx;
    PrngStream split_stream = stream.substream(0);
    stratified_validation_split(data, cfg.validation_fraction, split_stream,
                                train_idx, val_idx);
    if (train_idx.empty() || val_idx.empty()) {
        throw DataError("train: a split ended up empty; need at least one sample in "
                        "both train and validation");
    }
    Dataset train_set = data.subset(train_idx);
    Dataset val_set = data.subset(val_idx);
    // validation loss is unweighted: model selection should not follow the
    // boosting weights
    std::fill(val_set.weights.begin(), val_set.weights.end(), 1.0);

    AdamConfig adam_cfg;
    adam_cfg.learning_rate = cfg.learning_rate;
    AdamState adam(learner.parameters());

    TrainHistory history;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Tensor> best_params = learner.snapshot_parameters();
    std::size_t epochs_without_improvement = 0;

    const std::size_t n_train = train_set.size();
    const std::size_t batch_count = (n_train + cfg.batch_size - 1) / cfg.batch_size;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        PrngStream epoch_stream = stream.substream(epoch);
        PrngStream shuffle_stream = epoch_stream.substream(0);
        const auto order = permutation(shuffle_stream, n_train);

        double epoch_loss = 0.0;
        for (std::size_t b = 0; b < batch_count; ++b) {
            const std::size_t begin = b * cfg.batch_size;
            const std::size_t end = std::min(begin + cfg.batch_size, n_train);
            std::vector<std::size_t> batch_idx(order.begin() + begin,
                                               order.begin() + end);
            Dataset batch = train_set.subset(batch_idx);

            PrngStream noise_stream = epoch_stream.substream(1 + b);
            double loss;
            if (learner.mode() == LearnerMode::vi) {
                loss = elbo_loss(learner, batch, cfg.elbo_mc_samples, noise_stream,
                                 batch_count);
            } else {
                const bool stochastic = learner.mode() == LearnerMode::mcd;
                loss = cross_entropy_loss_and_grad(learner, batch, stochastic,
                                                   stochastic ? &noise_stream : nullptr);
            }
            epoch_loss += loss;
            adam.step(learner.parameters(), learner.gradients(), adam_cfg);
        }
        epoch_loss /= static_cast<double>(batch_count);

        const Tensor val_probs = learner.forward(val_set.features, false, nullptr);
        const double val_loss =
            weighted_cross_entropy(val_probs, val_set.labels, val_set.weights).value;
        history.epochs.push_back({epoch_loss, val_loss});

        if (val_loss < best_val) {
            best_val = val_loss;
            best_params = learner.snapshot_parameters();
            history.best_epoch = epoch;
            epochs_without_improvement = 0;
        } else {
            ++epochs_without_improvement;
            if (epochs_without_improvement >= cfg.patience) break;
        }
    }

    learner.restore_parameters(best_params);
    return history;
}

}  // namespace proboost
