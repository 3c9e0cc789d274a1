#pragma once

#include <string>

#include "proboost/boosting.hpp"
#include "proboost/learner.hpp"

namespace proboost {

/// Versioned JSON dump of layer specs plus parameter tensors. Doubles are
/// serialized with shortest round-trip formatting, so save -> load -> forward
/// is bit-identical.
void save_learner(const WeakLearner& learner, const std::string& path);
WeakLearner load_learner(const std::string& path);

/// Directory checkpoint: manifest.json (variant, tau, levels, seed, per-level
/// sizes) plus one learner file per level.
void save_boosted_model(const BoostedModel& model, const std::string& dir);
BoostedModel load_boosted_model(const std::string& dir);

}  // namespace proboost
