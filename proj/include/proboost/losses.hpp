#pragma once

#include <cstddef>
#include <vector>

#include "proboost/dataset.hpp"
#include "proboost/learner.hpp"
#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"

namespace proboost {

struct WeightedCeResult {
    double value = 0.0;
    Tensor grad_probs;  // dL/dprobs, same shape as probs
};

/// Weight-normalized cross-entropy: sum_i w_i * (-log probs[i, y_i]) / sum_i w_i.
/// Zero total weight raises InvalidParameter.
WeightedCeResult weighted_cross_entropy(const Tensor& probs,
                                        const std::vector<int>& labels,
                                        const std::vector<double>& sample_weights);

/// Negated sampled evidence lower bound for a vi learner on one mini-batch:
/// mean over n_mc posterior draws of
///   [log q(W|θ) - log P(W)] / batch_count + sum_i w_i * (-log P(y_i|x_i, W)),
/// so summing batches over an epoch recovers the full bound with the KL
/// counted once. Parameter gradients are accumulated into the learner (zeroed
/// first). n_mc < 1 raises InvalidParameter; non-vi learners are rejected.
double elbo_loss(WeakLearner& learner, const Dataset& batch, std::size_t n_mc,
                 PrngStream& stream, std::size_t batch_count = 1);

/// Weighted cross-entropy loss of one forward pass with gradients accumulated
/// into the learner (zeroed first). Used by the deterministic and mcd paths.
double cross_entropy_loss_and_grad(WeakLearner& learner, const Dataset& batch,
                                   bool stochastic, PrngStream* stream);

}  // namespace proboost
