#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "proboost/learner.hpp"
#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"

namespace proboost {

struct UncertaintyConfig {
    std::size_t mc_samples = 50;

    /// Family defaults: 50 draws for vi, 200 for mcd, 1 for deterministic.
    static UncertaintyConfig for_mode(LearnerMode mode);
};

struct PredictiveDistribution {
    Tensor mean_probs;                  // [batch, K]
    std::optional<Tensor> raw_samples;  // [T, batch, K] when retained
};

struct UncertaintyScores {
    std::vector<double> u;  // per-sample class-summed MC variance, >= 0
};

/// Average of T stochastic forward passes, each on its own substream of
/// `stream` (substream t for MC index t), so results do not depend on
/// evaluation order. T >= 1 required. Deterministic-mode learners yield T
/// identical samples.
PredictiveDistribution mc_predict(WeakLearner& learner, const Tensor& x,
                                  const UncertaintyConfig& cfg, PrngStream& stream,
                                  bool keep_samples = true);

/// Class-summed Monte Carlo variance per sample:
/// u[i] = sum_y (1/T) sum_t (P_t(y|x_i) - Pbar(y|x_i))^2.
/// Raises MissingSamples when raw samples were not retained.
UncertaintyScores epistemic_variance(const PredictiveDistribution& dist);

}  // namespace proboost
