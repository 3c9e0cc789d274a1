#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "proboost/dataset.hpp"
#include "proboost/learner.hpp"
#include "proboost/prng.hpp"
#include "proboost/train.hpp"
#include "proboost/uncertainty.hpp"

namespace proboost {

enum class BoostVariant { undersampled, oversampled, weighted };

const char* boost_variant_name(BoostVariant variant);
BoostVariant boost_variant_from_name(const std::string& name);

struct BoostConfig {
    BoostVariant variant = BoostVariant::weighted;
    std::size_t levels = 2;  // V; 1 is the no-boosting baseline
    double tau = 0.25;
    UncertaintyConfig uncertainty{50};
    TrainConfig train;
    std::uint64_t seed = 0;
};

struct BoostedModel {
    std::vector<WeakLearner> learners;       // one per level, in order
    std::vector<std::size_t> level_sizes;    // training-set size per level
    BoostConfig config;
};

/// Per-level retention factor R = tau^(1/(V-1)). V < 2 raises InvalidParameter
/// since no reduction step exists.
double reduction_factor(double tau, std::size_t levels);

/// Stable-sorts ascending by uncertainty, drops the floor(len / div_value)
/// least-uncertain samples, shuffles the rest. Emptied output raises
/// DataError. When applied_order is non-null it receives the mapping
/// output row -> input row.
Dataset undersample_step(const Dataset& d, const UncertaintyScores& u,
                         double div_value, PrngStream& stream,
                         std::vector<std::size_t>* applied_order = nullptr);

/// Duplicates the samples from sorted position floor(len * (1 - tau)) to the
/// end (the most uncertain ~tau fraction), concatenates and shuffles.
Dataset oversample_step(const Dataset& d, const UncertaintyScores& u, double tau,
                        PrngStream& stream,
                        std::vector<std::size_t>* applied_order = nullptr);

/// Adds one to the weights of the most uncertain ~tau fraction (after the
/// stable ascending sort), then co-shuffles samples and weights. The sample
/// multiset is unchanged.
Dataset weight_step(const Dataset& d, const UncertaintyScores& u, double tau,
                    PrngStream& stream,
                    std::vector<std::size_t>* applied_order = nullptr);

/// Builds a fresh untrained learner for one level from a level-specific
/// initialization stream.
using LearnerFactory = std::function<WeakLearner(PrngStream&)>;

/// Called after each level is trained. scores is null for the final level
/// (no transform follows it). origin maps each current row to its index in
/// the original training set.
struct LevelObservation {
    std::size_t level = 0;  // 1-based
    const Dataset* dataset = nullptr;
    const UncertaintyScores* scores = nullptr;
    const std::vector<std::size_t>* origin = nullptr;
    const WeakLearner* learner = nullptr;
};
using LevelObserver = std::function<void(const LevelObservation&)>;

/// The ProBoost cascade: for level = 1..V-1 train a fresh learner on the
/// current set, score it with the class-summed MC variance, apply the
/// variant's transform, and continue; level V trains on the final set.
BoostedModel run_proboost(const Dataset& data, const BoostConfig& cfg,
                          const LearnerFactory& factory,
                          const LevelObserver& observer = {});

}  // namespace proboost
