#include "proboost/ensemble.hpp"

#include <algorithm>

#include "proboost/errors.hpp"

namespace proboost {

const char* weight_scheme_name(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::FW: return "fw";
        case WeightScheme::VW: return "vw";
        case WeightScheme::VWO: return "vwo";
    }
    return "unknown";
}

WeightScheme weight_scheme_from_name(const std::string& name) {
    if (name == "fw" || name == "FW") return WeightScheme::FW;
    if (name == "vw" || name == "VW") return WeightScheme::VW;
    if (name == "vwo" || name == "VWO") return WeightScheme::VWO;
    throw InvalidParameter("unknown weight scheme: " + name);
}

std::vector<int> argmax_rows(const Tensor& scores) {
    const std::size_t n = scores.dim(0), k = scores.dim(1);
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = scores.at(i, 0);
        std::size_t best_j = 0;
        for (std::size_t j = 1; j < k; ++j) {
            if (scores.at(i, j) > best) {  // strict: ties keep the lowest index
                best = scores.at(i, j);
                best_j = j;
            }
        }
        labels[i] = static_cast<int>(best_j);
    }
    return labels;
}

std::vector<Tensor> per_learner_mean_probs(BoostedModel& boosted, const Tensor& x,
                                           const UncertaintyConfig& cfg,
                                           PrngStream& stream) {
    std::vector<Tensor> probs;
    probs.reserve(boosted.learners.size());
    for (std::size_t v = 0; v < boosted.learners.size(); ++v) {
        PrngStream sub = stream.substream(v);
        probs.push_back(
            mc_predict(boosted.learners[v], x, cfg, sub, false).mean_probs);
    }
    return probs;
}

EnsembleWeights fw_weights(std::size_t levels) {
    if (levels < 1) throw InvalidParameter("fw_weights: levels must be >= 1");
    EnsembleWeights w;
    w.scheme = WeightScheme::FW;
    w.psi.assign(levels, 0.5);
    w.psi[0] = 1.0;
    return w;
}

namespace {

double accuracy_of(const std::vector<int>& predicted, const std::vector<int>& truth) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace

EnsembleWeights vw_weights(BoostedModel& boosted, const Dataset& full_train,
                           const UncertaintyConfig& cfg, PrngStream& stream) {
    EnsembleWeights w;
    w.scheme = WeightScheme::VW;
    const auto probs = per_learner_mean_probs(boosted, full_train.features, cfg, stream);
    w.psi.reserve(probs.size());
    for (const Tensor& p : probs) {
        w.psi.push_back(accuracy_of(argmax_rows(p), full_train.labels));
    }
    return w;
}

VwoResult vwo_search(BoostedModel& boosted, const Dataset& test,
                     const UncertaintyConfig& cfg, PrngStream& stream,
                     std::size_t n_candidates) {
    if (test.size() == 0) throw DataError("vwo_search: empty test set");
    if (n_candidates < 1) throw InvalidParameter("vwo_search: need >= 1 candidate");
    const std::size_t v = boosted.learners.size();

    PrngStream predict_stream = stream.substream(0);
    const auto probs = per_learner_mean_probs(boosted, test.features, cfg,
                                              predict_stream);
    const std::size_t n = test.size();
    const std::size_t k = static_cast<std::size_t>(test.n_classes);

    PrngStream candidate_stream = stream.substream(1);
    VwoResult result;
    result.best_accuracy = -1.0;
    std::vector<double> psi(v);
    Tensor scores({n, k});
    for (std::size_t c = 0; c < n_candidates; ++c) {
        for (double& w : psi) w = candidate_stream.next_uniform();
        scores.fill(0.0);
        for (std::size_t lv = 0; lv < v; ++lv) {
            const double w = psi[lv];
            const double* p = probs[lv].data();
            double* s = scores.data();
            for (std::size_t i = 0; i < n * k; ++i) s[i] += w * p[i];
        }
        const double acc = accuracy_of(argmax_rows(scores), test.labels);
        if (acc > result.best_accuracy) {  // strict: first-drawn wins ties
            result.best_accuracy = acc;
            result.weights.psi = psi;
        }
    }
    result.weights.scheme = WeightScheme::VWO;
    return result;
}

EnsemblePrediction ensemble_predict(EnsembleModel& model, const Tensor& x,
                                    PrngStream& stream) {
    const std::size_t v = model.boosted.learners.size();
    if (model.weights.psi.size() != v) {
        throw InvalidParameter("ensemble_predict: weight count must equal level count");
    }
    bool any_positive = false;
    for (double w : model.weights.psi) {
        if (w < 0.0) throw InvalidParameter("ensemble_predict: weights must be >= 0");
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive) {
        throw InvalidParameter("ensemble_predict: at least one weight must be positive");
    }

    const auto probs =
        per_learner_mean_probs(model.boosted, x, model.uncertainty, stream);
    const std::size_t n = x.dim(0);
    const std::size_t k = model.boosted.learners.front().n_classes();

    EnsemblePrediction pred;
    pred.scores = Tensor({n, k});
    // accumulate in level order so the float sum is reproducible
    for (std::size_t lv = 0; lv < v; ++lv) {
        const double w = model.weights.psi[lv];
        const double* p = probs[lv].data();
        double* s = pred.scores.data();
        for (std::size_t i = 0; i < n * k; ++i) s[i] += w * p[i];
    }
    pred.labels = argmax_rows(pred.scores);
    return pred;
}

}  // namespace proboost
