#include <doctest.h>

#include <cmath>
#include <vector>

#include "proboost/dataset.hpp"
#include "proboost/errors.hpp"
#include "proboost/layers.hpp"
#include "proboost/learner.hpp"
#include "proboost/losses.hpp"
#include "proboost/optimizer.hpp"

using namespace proboost;

TEST_CASE("weighted_cross_entropy: uniform weights give the plain mean") {
    Tensor probs({2, 2}, {0.5, 0.5, 0.25, 0.75});
    const auto r = weighted_cross_entropy(probs, {0, 1}, {1.0, 1.0});
    const double expected = 0.5 * (-std::log(0.5) - std::log(0.75));
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("weighted_cross_entropy: doubling every weight changes nothing") {
    Tensor probs({3, 2}, {0.5, 0.5, 0.25, 0.75, 0.9, 0.1});
    const std::vector<int> labels = {0, 1, 0};
    const auto a = weighted_cross_entropy(probs, labels, {1.0, 2.0, 3.0});
    const auto b = weighted_cross_entropy(probs, labels, {2.0, 4.0, 6.0});
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("weighted_cross_entropy: hand case losses ln2 and 2ln2, weights 1 and 3") {
    // p = 0.5 gives loss ln2; p = 0.25 gives 2 ln2
    Tensor probs({2, 2}, {0.5, 0.5, 0.25, 0.75});
    const auto r = weighted_cross_entropy(probs, {0, 0}, {1.0, 3.0});
    CHECK(r.value == doctest::Approx(1.75 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("weighted_cross_entropy: zero total weight rejected") {
    Tensor probs({1, 2}, {0.5, 0.5});
    CHECK_THROWS_AS(weighted_cross_entropy(probs, {0}, {0.0}), InvalidParameter);
}

TEST_CASE("elbo_loss: posterior equal to prior cancels the complexity term") {
    PrngStream init(30);
    WeakLearner learner = build_dense_stack(2, {}, 2, LearnerMode::vi, init);
    auto* flip = dynamic_cast<FlipoutDenseLayer*>(learner.layers()[0].get());
    REQUIRE(flip != nullptr);
    // posterior == prior: mu 0, std 1
    flip->weight_posterior().mu.fill(0.0);
    flip->weight_posterior().rho.fill(softplus_inverse(1.0));
    flip->bias_posterior().mu.fill(0.0);
    flip->bias_posterior().rho.fill(softplus_inverse(1.0));

    Tensor x({2, 2}, {0.3, -0.4, 1.0, 0.2});
    Dataset batch(x, {0, 1}, 2);

    const std::uint64_t seed = 777;
    PrngStream stream(seed);
    const double loss = elbo_loss(learner, batch, 1, stream, 1);

    // replay the same draw to get the pure likelihood term
    PrngStream replay(seed);
    const Tensor probs = learner.forward(batch.features, true, &replay);
    double nll = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        nll -= std::log(probs.at(i, static_cast<std::size_t>(batch.labels[i])));
    }
    CHECK(loss == doctest::Approx(nll).epsilon(1e-10));
}

TEST_CASE("elbo_loss: single point with uniform two-class output") {
    PrngStream init(31);
    WeakLearner learner = build_dense_stack(2, {}, 2, LearnerMode::vi, init);
    auto* flip = dynamic_cast<FlipoutDenseLayer*>(learner.layers()[0].get());
    REQUIRE(flip != nullptr);
    // zero input and a numerically point-mass bias at zero force equal logits
    flip->bias_posterior().mu.fill(0.0);
    flip->bias_posterior().rho.fill(-40.0);

    Tensor x({1, 2}, {0.0, 0.0});
    Dataset batch(x, {1}, 2);

    const std::uint64_t seed = 88;
    PrngStream replay(seed);
    const Tensor probs = learner.forward(batch.features, true, &replay);
    CHECK(probs.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    const double nll = -std::log(probs.at(0, 1));
    CHECK(nll == doctest::Approx(-std::log(0.5)).epsilon(1e-9));

    // the full loss decomposes into that likelihood plus the sampled KL
    PrngStream stream(seed);
    const double loss = elbo_loss(learner, batch, 1, stream, 4);
    PrngStream replay2(seed);
    learner.forward(batch.features, true, &replay2);
    double kl = 0.0;
    for (auto& layer : learner.layers()) {
        if (auto* f = dynamic_cast<FlipoutDenseLayer*>(layer.get())) {
            // measure only: zero the gradients afterwards
            kl += f->sampled_kl_and_grad(0.0);
        }
    }
    learner.zero_grad();
    CHECK(loss == doctest::Approx(nll + kl / 4.0).epsilon(1e-10));
}

TEST_CASE("elbo_loss: invalid sample counts and modes rejected") {
    PrngStream init(32);
    WeakLearner vi = build_dense_stack(2, {}, 2, LearnerMode::vi, init);
    WeakLearner det = build_dense_stack(2, {}, 2, LearnerMode::deterministic, init);
    Tensor x({1, 2}, {0.1, 0.2});
    Dataset batch(x, {0}, 2);
    PrngStream stream(1);
    CHECK_THROWS_AS(elbo_loss(vi, batch, 0, stream), InvalidParameter);
    CHECK_THROWS_AS(elbo_loss(det, batch, 1, stream), InvalidParameter);
}

TEST_CASE("adam: first-step magnitude, zero gradients, determinism") {
    Tensor p({2}, {1.0, -2.0});
    Tensor g({2}, {1.0, 1.0});
    std::vector<Tensor*> params{&p};
    std::vector<Tensor*> grads{&g};
    AdamState state(params);
    AdamConfig cfg;

    state.step(params, grads, cfg);
    const double expected_delta = -1e-3 * (1.0 / (1.0 + 1e-8));
    CHECK(p[0] == doctest::Approx(1.0 + expected_delta).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(-2.0 + expected_delta).epsilon(1e-12));

    // zero gradient from a fresh state leaves parameters unchanged
    Tensor q({2}, {3.0, 4.0});
    Tensor zg({2});
    std::vector<Tensor*> qp{&q};
    std::vector<Tensor*> qg{&zg};
    AdamState fresh(qp);
    fresh.step(qp, qg, cfg);
    CHECK(q[0] == 3.0);
    CHECK(q[1] == 4.0);

    // identical state and gradients give identical parameters
    Tensor a({2}, {1.0, 1.0}), b({2}, {1.0, 1.0});
    Tensor ga({2}, {0.5, -0.5}), gb({2}, {0.5, -0.5});
    std::vector<Tensor*> ap{&a}, bp{&b}, agr{&ga}, bgr{&gb};
    AdamState sa(ap), sb(bp);
    for (int i = 0; i < 5; ++i) {
        sa.step(ap, agr, cfg);
        sb.step(bp, bgr, cfg);
    }
    CHECK(a.values() == b.values());
}
