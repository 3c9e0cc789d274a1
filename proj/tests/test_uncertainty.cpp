#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "proboost/errors.hpp"
#include "proboost/learner.hpp"
#include "proboost/uncertainty.hpp"

using namespace proboost;

namespace {

// two-loop reference implementation of the class-summed MC variance
std::vector<double> variance_brute_force(const Tensor& samples) {
    const std::size_t t_count = samples.dim(0), n = samples.dim(1), k = samples.dim(2);
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t y = 0; y < k; ++y) {
            double mean = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                mean += samples[t * n * k + i * k + y];
            }
            mean /= static_cast<double>(t_count);
            double acc = 0.0;
            for (std::size_t t = 0; t < t_count; ++t) {
                const double d = samples[t * n * k + i * k + y] - mean;
                acc += d * d;
            }
            u[i] += acc / static_cast<double>(t_count);
        }
    }
    return u;
}

PredictiveDistribution dist_from_samples(Tensor samples) {
    PredictiveDistribution dist;
    const std::size_t t_count = samples.dim(0), n = samples.dim(1), k = samples.dim(2);
    dist.mean_probs = Tensor({n, k});
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t i = 0; i < n * k; ++i) {
            dist.mean_probs[i] += samples[t * n * k + i];
        }
    }
    for (std::size_t i = 0; i < n * k; ++i) {
        dist.mean_probs[i] /= static_cast<double>(t_count);
    }
    dist.raw_samples = std::move(samples);
    return dist;
}

}  // namespace

TEST_CASE("epistemic_variance: hand-evaluated two-sample toy") {
    Tensor samples({2, 1, 2}, {0.8, 0.2, 0.6, 0.4});
    const auto dist = dist_from_samples(samples);
    CHECK(dist.mean_probs.at(0, 0) == doctest::Approx(0.7));
    CHECK(dist.mean_probs.at(0, 1) == doctest::Approx(0.3));
    const auto scores = epistemic_variance(dist);
    REQUIRE(scores.u.size() == 1);
    CHECK(scores.u[0] == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("epistemic_variance: identical rows give zero, permutations change nothing") {
    Tensor same({3, 2, 2}, {0.9, 0.1, 0.3, 0.7,
                            0.9, 0.1, 0.3, 0.7,
                            0.9, 0.1, 0.3, 0.7});
    const auto zero = epistemic_variance(dist_from_samples(same));
    CHECK(zero.u[0] == 0.0);
    CHECK(zero.u[1] == 0.0);

    PrngStream stream(60);
    Tensor samples({4, 3, 2});
    for (std::size_t i = 0; i < samples.size(); i += 2) {
        const double p = stream.next_uniform();
        samples[i] = p;
        samples[i + 1] = 1.0 - p;
    }
    const auto base = epistemic_variance(dist_from_samples(samples));

    // swap MC rows 0 and 3
    Tensor shuffled = samples;
    const std::size_t block = 3 * 2;
    for (std::size_t i = 0; i < block; ++i) {
        std::swap(shuffled[i], shuffled[3 * block + i]);
    }
    const auto permuted = epistemic_variance(dist_from_samples(shuffled));
    for (std::size_t i = 0; i < base.u.size(); ++i) {
        CHECK(base.u[i] == doctest::Approx(permuted.u[i]).epsilon(1e-12));
    }
}

TEST_CASE("epistemic_variance: agrees with the two-loop brute force, bounded by K/4") {
    PrngStream stream(61);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t t_count = 2 + stream.next_below(7);
        const std::size_t n = 1 + stream.next_below(6);
        const std::size_t k = 2 + stream.next_below(4);
        Tensor samples({t_count, n, k});
        for (std::size_t t = 0; t < t_count; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                double row_sum = 0.0;
                for (std::size_t y = 0; y < k; ++y) {
                    const double v = stream.next_uniform();
                    samples[t * n * k + i * k + y] = v;
                    row_sum += v;
                }
                for (std::size_t y = 0; y < k; ++y) {
                    samples[t * n * k + i * k + y] /= row_sum;
                }
            }
        }
        const auto got = epistemic_variance(dist_from_samples(samples));
        const auto expected = variance_brute_force(samples);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(got.u[i] - expected[i]) < 1e-12);
            CHECK(got.u[i] >= 0.0);
            CHECK(got.u[i] <= static_cast<double>(k) / 4.0);
        }
    }
}

TEST_CASE("epistemic_variance: missing raw samples raises MissingSamples") {
    PredictiveDistribution dist;
    dist.mean_probs = Tensor({1, 2}, {0.5, 0.5});
    CHECK_THROWS_AS(epistemic_variance(dist), MissingSamples);
}

TEST_CASE("mc_predict: mean equals the replayed per-draw average") {
    PrngStream init(62);
    WeakLearner learner = build_dense_stack(3, {4}, 2, LearnerMode::mcd, init, 0.4);
    Tensor x({5, 3});
    PrngStream xs(63);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = xs.next_uniform();

    UncertaintyConfig cfg{4};
    PrngStream stream(64);
    const auto dist = mc_predict(learner, x, cfg, stream, true);

    // oracle: average the same four stochastic forwards by hand
    Tensor mean({5, 2});
    for (std::size_t t = 0; t < 4; ++t) {
        PrngStream sub = PrngStream(64).substream(t);
        const Tensor p = learner.forward(x, true, &sub);
        for (std::size_t i = 0; i < p.size(); ++i) mean[i] += p[i];
    }
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] /= 4.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        CHECK(dist.mean_probs[i] == doctest::Approx(mean[i]).epsilon(1e-12));
    }

    // T=1 equals the single stochastic forward
    UncertaintyConfig one{1};
    PrngStream s1(65);
    const auto single = mc_predict(learner, x, one, s1, false);
    PrngStream sub0 = PrngStream(65).substream(0);
    const Tensor direct = learner.forward(x, true, &sub0);
    CHECK(single.mean_probs.values() == direct.values());
}

TEST_CASE("mc_predict: deterministic learner yields identical samples and zero u") {
    PrngStream init(66);
    WeakLearner learner = build_dense_stack(3, {}, 2, LearnerMode::deterministic, init);
    Tensor x({4, 3});
    PrngStream xs(67);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = xs.next_uniform();

    UncertaintyConfig cfg{5};
    PrngStream stream(68);
    const auto dist = mc_predict(learner, x, cfg, stream, true);
    const Tensor direct = learner.forward(x, false, nullptr);
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(dist.mean_probs[i] == doctest::Approx(direct[i]).epsilon(1e-12));
    }
    const auto scores = epistemic_variance(dist);
    for (double u : scores.u) CHECK(u == 0.0);
}

TEST_CASE("mc_predict: doubling T shrinks the u estimator noise like 1/sqrt(T)") {
    // repeated-seed statistics of u for one fixed learner and input
    PrngStream init(70);
    WeakLearner learner = build_dense_stack(2, {3}, 2, LearnerMode::mcd, init, 0.4);
    Tensor x({1, 2}, {0.4, -0.7});

    const auto u_for = [&](std::size_t t_count, std::uint64_t seed) {
        UncertaintyConfig cfg{t_count};
        PrngStream stream(seed);
        return epistemic_variance(mc_predict(learner, x, cfg, stream, true)).u[0];
    };
    const std::size_t replicates = 160;
    std::vector<double> u8(replicates), u32(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        u8[r] = u_for(8, 1000 + r);
        u32[r] = u_for(32, 5000 + r);
    }
    const auto sd = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x_i : v) mean += x_i;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x_i : v) ss += (x_i - mean) * (x_i - mean);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    // quadrupling T should halve the spread; allow generous statistical slack
    const double ratio = sd(u8) / sd(u32);
    CHECK(ratio > 1.3);
    CHECK(ratio < 3.2);
}
