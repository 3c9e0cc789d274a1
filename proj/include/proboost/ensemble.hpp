#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "proboost/boosting.hpp"
#include "proboost/dataset.hpp"
#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"
#include "proboost/uncertainty.hpp"

namespace proboost {

enum class WeightScheme { FW, VW, VWO };

const char* weight_scheme_name(WeightScheme scheme);
WeightScheme weight_scheme_from_name(const std::string& name);

struct EnsembleWeights {
    std::vector<double> psi;  // one weight per level, >= 0, at least one > 0
    WeightScheme scheme = WeightScheme::FW;
};

struct EnsembleModel {
    BoostedModel boosted;
    EnsembleWeights weights;
    UncertaintyConfig uncertainty{50};
};

struct EnsemblePrediction {
    std::vector<int> labels;
    Tensor scores;  // [batch, K], sum over levels of psi_v * P_v
};

/// MC-mean class probabilities of every learner on x; learner v uses
/// substream v of `stream`.
std::vector<Tensor> per_learner_mean_probs(BoostedModel& boosted, const Tensor& x,
                                           const UncertaintyConfig& cfg,
                                           PrngStream& stream);

/// Fixed weights: 1 for the first level, 0.5 for every later level.
EnsembleWeights fw_weights(std::size_t levels);

/// Variable weights: each learner's plain accuracy of its MC-mean argmax over
/// the whole original training set.
EnsembleWeights vw_weights(BoostedModel& boosted, const Dataset& full_train,
                           const UncertaintyConfig& cfg, PrngStream& stream);

struct VwoResult {
    EnsembleWeights weights;
    double best_accuracy = 0.0;
};

/// Clairvoyant oracle weighting: draws n_candidates weight vectors uniformly
/// on [0,1]^V and returns the first one maximizing accuracy on the given test
/// set. Consumes the test labels by construction; report it separately, never
/// as a deployable model.
VwoResult vwo_search(BoostedModel& boosted, const Dataset& test,
                     const UncertaintyConfig& cfg, PrngStream& stream,
                     std::size_t n_candidates = 10000);

/// Eq.-12 style prediction: scores[x, y] = sum_v psi_v * P_v(y | x), label =
/// argmax with ties going to the lowest class index.
EnsemblePrediction ensemble_predict(EnsembleModel& model, const Tensor& x,
                                    PrngStream& stream);

/// Argmax with lowest-index tie break, applied per row.
std::vector<int> argmax_rows(const Tensor& scores);

}  // namespace proboost
