#include "proboost/losses.hpp"

#include <cmath>

#include "proboost/errors.hpp"

namespace proboost {

namespace {

constexpr double kProbFloor = 1e-300;  // keeps log finite; softmax output is > 0

}  // namespace

WeightedCeResult weighted_cross_entropy(const Tensor& probs,
                                        const std::vector<int>& labels,
                                        const std::vector<double>& sample_weights) {
    if (probs.rank() != 2) throw ShapeError("weighted_cross_entropy: probs must be [N, K]");
    const std::size_t n = probs.dim(0), k = probs.dim(1);
    if (labels.size() != n || sample_weights.size() != n) {
        throw ShapeError("weighted_cross_entropy: labels/weights misaligned with probs");
    }
    double weight_sum = 0.0;
    for (double w : sample_weights) weight_sum += w;
    if (weight_sum == 0.0) {
        throw InvalidParameter("weighted_cross_entropy: zero total weight");
    }

    WeightedCeResult result;
    result.grad_probs = Tensor({n, k});
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= k) {
            throw InvalidParameter("weighted_cross_entropy: label out of range");
        }
        const double p = std::max(probs.at(i, static_cast<std::size_t>(y)), kProbFloor);
        result.value += sample_weights[i] * (-std::log(p));
        result.grad_probs.at(i, static_cast<std::size_t>(y)) =
            -sample_weights[i] / (p * weight_sum);
    }
    result.value /= weight_sum;
    return result;
}

double cross_entropy_loss_and_grad(WeakLearner& learner, const Dataset& batch,
                                   bool stochastic, PrngStream* stream) {
    learner.zero_grad();
    const Tensor probs = learner.forward(batch.features, stochastic, stream);
    const WeightedCeResult ce =
        weighted_cross_entropy(probs, batch.labels, batch.weights);
    learner.backward(ce.grad_probs);
    return ce.value;
}

double elbo_loss(WeakLearner& learner, const Dataset& batch, std::size_t n_mc,
                 PrngStream& stream, std::size_t batch_count) {
    if (n_mc < 1) throw InvalidParameter("elbo_loss: n_mc must be >= 1");
    if (batch_count < 1) throw InvalidParameter("elbo_loss: batch_count must be >= 1");
    if (learner.mode() != LearnerMode::vi) {
        throw InvalidParameter("elbo_loss: learner must be in vi mode");
    }
    if (batch.size() == 0) throw DataError("elbo_loss: empty batch");

    learner.zero_grad();
    const double mc_scale = 1.0 / static_cast<double>(n_mc);
    const double kl_scale = mc_scale / static_cast<double>(batch_count);
    const std::size_t n = batch.size();
    const std::size_t k = learner.n_classes();

    double total = 0.0;
    for (std::size_t draw = 0; draw < n_mc; ++draw) {
        const Tensor probs = learner.forward(batch.features, true, &stream);

        // likelihood term: per-sample weighted sum, not normalized, so the
        // epoch total is the data log-likelihood of the full bound
        double nll = 0.0;
        Tensor grad_probs({n, k});
        for (std::size_t i = 0; i < n; ++i) {
            const int y = batch.labels[i];
            const double w = batch.weights[i];
            const double p = std::max(probs.at(i, static_cast<std::size_t>(y)), kProbFloor);
            nll += w * (-std::log(p));
            grad_probs.at(i, static_cast<std::size_t>(y)) = -w / p * mc_scale;
        }
        learner.backward(grad_probs);

        // sampled complexity term at this draw's base weights
        double kl = 0.0;
        for (auto& layer : learner.layers()) {
            if (auto* flip = dynamic_cast<FlipoutDenseLayer*>(layer.get())) {
                kl += flip->sampled_kl_and_grad(kl_scale);
            }
        }
        total += mc_scale * (nll + kl / static_cast<double>(batch_count));
    }
    return total;
}

}  // namespace proboost
