#include "proboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proboost/errors.hpp"
#include "proboost/numerics.hpp"
#include "proboost/train.hpp"

namespace proboost {

const char* boost_variant_name(BoostVariant variant) {
    switch (variant) {
        case BoostVariant::undersampled: return "undersampled";
        case BoostVariant::oversampled: return "oversampled";
        case BoostVariant::weighted: return "weighted";
    }
    return "unknown";
}

BoostVariant boost_variant_from_name(const std::string& name) {
    if (name == "undersampled" || name == "under") return BoostVariant::undersampled;
    if (name == "oversampled" || name == "over") return BoostVariant::oversampled;
    if (name == "weighted") return BoostVariant::weighted;
    throw InvalidParameter("unknown boost variant: " + name);
}

double reduction_factor(double tau, std::size_t levels) {
    if (tau <= 0.0 || tau >= 1.0) {
        throw InvalidParameter("reduction_factor: tau must be in (0, 1)");
    }
    if (levels < 2) {
        throw InvalidParameter("reduction_factor: no reduction step exists for V < 2");
    }
    return std::pow(tau, 1.0 / static_cast<double>(levels - 1));
}

namespace {

void check_alignment(const Dataset& d, const UncertaintyScores& u) {
    if (u.u.size() != d.size()) {
        throw InvalidParameter("boost step: uncertainty scores misaligned with dataset");
    }
}

// hardest-fraction boundary of Algorithms 2-3: integer(len * (1 - tau))
std::size_t tau_boundary(std::size_t len, double tau) {
    return static_cast<std::size_t>(
        std::floor(static_cast<double>(len) * (1.0 - tau)));
}

}  // namespace

Dataset undersample_step(const Dataset& d, const UncertaintyScores& u,
                         double div_value, PrngStream& stream,
                         std::vector<std::size_t>* applied_order) {
    check_alignment(d, u);
    if (div_value <= 1.0) {
        throw InvalidParameter("undersample_step: divValue must be > 1");
    }
    const std::size_t len = d.size();
    const std::size_t n_drop = static_cast<std::size_t>(
        std::floor(static_cast<double>(len) / div_value));
    if (n_drop >= len) {
        throw DataError("undersample_step: transform would empty the dataset");
    }
    const auto sorted = stable_argsort_ascending(u.u);
    std::vector<std::size_t> kept(sorted.begin() + static_cast<std::ptrdiff_t>(n_drop),
                                  sorted.end());
    const auto shuffle = permutation(stream, kept.size());
    std::vector<std::size_t> order(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) order[i] = kept[shuffle[i]];
    if (applied_order) *applied_order = order;
    return d.subset(order);
}

Dataset oversample_step(const Dataset& d, const UncertaintyScores& u, double tau,
                        PrngStream& stream,
                        std::vector<std::size_t>* applied_order) {
    check_alignment(d, u);
    if (tau <= 0.0 || tau >= 1.0) {
        throw InvalidParameter("oversample_step: tau must be in (0, 1)");
    }
    const std::size_t len = d.size();
    const auto sorted = stable_argsort_ascending(u.u);
    const std::size_t boundary = tau_boundary(len, tau);

    std::vector<std::size_t> combined(sorted);  // original samples, sorted order
    for (std::size_t i = boundary; i < len; ++i) combined.push_back(sorted[i]);
    const auto shuffle = permutation(stream, combined.size());
    std::vector<std::size_t> order(combined.size());
    for (std::size_t i = 0; i < combined.size(); ++i) order[i] = combined[shuffle[i]];
    if (applied_order) *applied_order = order;
    return d.subset(order);
}

Dataset weight_step(const Dataset& d, const UncertaintyScores& u, double tau,
                    PrngStream& stream, std::vector<std::size_t>* applied_order) {
    check_alignment(d, u);
    if (tau <= 0.0 || tau >= 1.0) {
        throw InvalidParameter("weight_step: tau must be in (0, 1)");
    }
    const std::size_t len = d.size();
    const auto sorted = stable_argsort_ascending(u.u);
    const std::size_t boundary = tau_boundary(len, tau);

    Dataset bumped = d;
    for (std::size_t i = boundary; i < len; ++i) bumped.weights[sorted[i]] += 1.0;

    const auto shuffle = permutation(stream, len);
    std::vector<std::size_t> order(len);
    for (std::size_t i = 0; i < len; ++i) order[i] = sorted[shuffle[i]];
    if (applied_order) *applied_order = order;
    return bumped.subset(order);
}

namespace {

// stream roles within one level
constexpr std::uint64_t kStreamInit = 0;
constexpr std::uint64_t kStreamTrain = 1;
constexpr std::uint64_t kStreamScore = 2;
constexpr std::uint64_t kStreamTransform = 3;

// Score the training set in bounded chunks so the retained raw samples stay
// small even for large T.
UncertaintyScores score_dataset(WeakLearner& learner, const Dataset& d,
                                const UncertaintyConfig& cfg, PrngStream& stream) {
    constexpr std::size_t kChunk = 2048;
    UncertaintyScores scores;
    scores.u.reserve(d.size());
    const std::size_t stride = d.sample_elements();
    for (std::size_t begin = 0; begin < d.size(); begin += kChunk) {
        const std::size_t end = std::min(begin + kChunk, d.size());
        std::vector<std::size_t> chunk_shape = d.features.shape();
        chunk_shape[0] = end - begin;
        Tensor chunk(chunk_shape);
        std::copy_n(d.features.data() + begin * stride, (end - begin) * stride,
                    chunk.data());
        PrngStream chunk_stream = stream.substream(begin / kChunk);
        const auto dist = mc_predict(learner, chunk, cfg, chunk_stream, true);
        const auto chunk_scores = epistemic_variance(dist);
        scores.u.insert(scores.u.end(), chunk_scores.u.begin(), chunk_scores.u.end());
    }
    return scores;
}

}  // namespace

BoostedModel run_proboost(const Dataset& data, const BoostConfig& cfg,
                          const LearnerFactory& factory,
                          const LevelObserver& observer) {
    if (cfg.levels < 1) throw InvalidParameter("run_proboost: levels must be >= 1");
    if (cfg.tau <= 0.0 || cfg.tau >= 1.0) {
        throw InvalidParameter("run_proboost: tau must be in (0, 1)");
    }
    if (data.size() == 0) throw DataError("run_proboost: empty dataset");

    const std::size_t v = cfg.levels;
    const double div_value =
        v >= 2 ? 1.0 / (1.0 - reduction_factor(cfg.tau, v)) : 0.0;

    PrngStream master(cfg.seed);
    BoostedModel model;
    model.config = cfg;
    model.learners.reserve(v);

    Dataset current = data;
    std::vector<std::size_t> origin(data.size());
    for (std::size_t i = 0; i < origin.size(); ++i) origin[i] = i;

    for (std::size_t level = 1; level <= v; ++level) {
        if (current.size() == 0) {
            throw DataError("run_proboost: training set exhausted at level " +
                            std::to_string(level));
        }
        PrngStream level_stream = master.substream(level);
        PrngStream init_stream = level_stream.substream(kStreamInit);
        PrngStream train_stream = level_stream.substream(kStreamTrain);

        WeakLearner learner = factory(init_stream);
        train(learner, current, cfg.train, train_stream);
        model.level_sizes.push_back(current.size());

        if (level == v) {
            if (observer) {
                observer({level, &current, nullptr, &origin, &learner});
            }
            model.learners.push_back(std::move(learner));
            break;
        }

        PrngStream score_stream = level_stream.substream(kStreamScore);
        const UncertaintyScores scores =
            score_dataset(learner, current, cfg.uncertainty, score_stream);
        if (observer) {
            observer({level, &current, &scores, &origin, &learner});
        }
        model.learners.push_back(std::move(learner));

        PrngStream transform_stream = level_stream.substream(kStreamTransform);
        std::vector<std::size_t> applied;
        switch (cfg.variant) {
            case BoostVariant::undersampled:
                current = undersample_step(current, scores, div_value,
                                           transform_stream, &applied);
                break;
            case BoostVariant::oversampled:
                current = oversample_step(current, scores, cfg.tau, transform_stream,
                                          &applied);
                break;
            case BoostVariant::weighted:
                current = weight_step(current, scores, cfg.tau, transform_stream,
                                      &applied);
                break;
        }
        std::vector<std::size_t> next_origin(applied.size());
        for (std::size_t i = 0; i < applied.size(); ++i) {
            next_origin[i] = origin[applied[i]];
        }
        origin = std::move(next_origin);
    }
    return model;
}

}  // namespace proboost
