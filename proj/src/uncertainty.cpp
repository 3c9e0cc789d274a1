#include "proboost/uncertainty.hpp"

#include <algorithm>

#include "proboost/errors.hpp"

namespace proboost {

UncertaintyConfig UncertaintyConfig::for_mode(LearnerMode mode) {
    switch (mode) {
        case LearnerMode::vi: return {50};
        case LearnerMode::mcd: return {200};
        case LearnerMode::deterministic: return {1};
    }
    return {50};
}

PredictiveDistribution mc_predict(WeakLearner& learner, const Tensor& x,
                                  const UncertaintyConfig& cfg, PrngStream& stream,
                                  bool keep_samples) {
    if (cfg.mc_samples < 1) throw InvalidParameter("mc_predict: mc_samples must be >= 1");
    const std::size_t t_count = cfg.mc_samples;
    const std::size_t n = x.dim(0);
    const std::size_t k = learner.n_classes();

    PredictiveDistribution dist;
    dist.mean_probs = Tensor({n, k});
    if (keep_samples) dist.raw_samples = Tensor({t_count, n, k});

    for (std::size_t t = 0; t < t_count; ++t) {
        PrngStream sub = stream.substream(t);
        const Tensor probs = learner.forward(x, true, &sub);
        double* mean = dist.mean_probs.data();
        const double* p = probs.data();
        for (std::size_t i = 0; i < n * k; ++i) mean[i] += p[i];
        if (keep_samples) {
            std::copy_n(p, n * k, dist.raw_samples->data() + t * n * k);
        }
    }
    const double inv_t = 1.0 / static_cast<double>(t_count);
    for (std::size_t i = 0; i < n * k; ++i) dist.mean_probs[i] *= inv_t;
    return dist;
}

UncertaintyScores epistemic_variance(const PredictiveDistribution& dist) {
    if (!dist.raw_samples.has_value()) {
        throw MissingSamples("epistemic_variance: raw MC samples were not retained");
    }
    const Tensor& samples = *dist.raw_samples;
    const std::size_t t_count = samples.dim(0);
    const std::size_t n = samples.dim(1);
    const std::size_t k = samples.dim(2);

    UncertaintyScores scores;
    scores.u.assign(n, 0.0);
    const double inv_t = 1.0 / static_cast<double>(t_count);
    const double* first = samples.data();
    for (std::size_t i = 0; i < n; ++i) {
        // u[i] must be exactly zero when every MC row is identical; the mean
        // round-trip alone leaves ~1e-33 residue
        bool identical = true;
        for (std::size_t t = 1; t < t_count && identical; ++t) {
            const double* p = samples.data() + t * n * k + i * k;
            for (std::size_t y = 0; y < k; ++y) {
                if (p[y] != first[i * k + y]) {
                    identical = false;
                    break;
                }
            }
        }
        if (identical) continue;
        double acc = 0.0;
        for (std::size_t t = 0; t < t_count; ++t) {
            const double* p = samples.data() + t * n * k + i * k;
            for (std::size_t y = 0; y < k; ++y) {
                const double d = p[y] - dist.mean_probs.at(i, y);
                acc += d * d;
            }
        }
        scores.u[i] = acc * inv_t;
    }
    return scores;
}

}  // namespace proboost
