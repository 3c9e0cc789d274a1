#include <doctest.h>

#include <cmath>
#include <vector>

#include "proboost/dataset.hpp"
#include "proboost/ensemble.hpp"
#include "proboost/errors.hpp"
#include "proboost/learner.hpp"
#include "proboost/train.hpp"

using namespace proboost;

namespace {

// Two linearly separable 2-d clusters.
Dataset separable_toy(std::size_t per_class, PrngStream& stream) {
    const std::size_t n = per_class * 2;
    Tensor features({n, 2});
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = static_cast<int>(i % 2);
        const double cx = cls == 0 ? -2.0 : 2.0;
        features.at(i, 0) = cx + 0.5 * stream.next_gaussian();
        features.at(i, 1) = cx + 0.5 * stream.next_gaussian();
        labels[i] = cls;
    }
    return Dataset(std::move(features), std::move(labels), 2);
}

double training_accuracy(WeakLearner& learner, const Dataset& data) {
    const Tensor probs = learner.forward(data.features, false, nullptr);
    const auto pred = argmax_rows(probs);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (pred[i] == data.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("stratified_validation_split: per-class floor fractions") {
    PrngStream gen(40);
    Tensor features({10, 1});
    std::vector<int> labels = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    Dataset data(features, labels, 2);
    std::vector<std::size_t> train_idx, val_idx;
    PrngStream stream(1);
    stratified_validation_split(data, 0.3, stream, train_idx, val_idx);
    CHECK(val_idx.size() == 2);  // floor(6*0.3) + floor(4*0.3) = 1 + 1
    CHECK(train_idx.size() == 8);
    // disjoint and complete
    std::vector<bool> seen(10, false);
    for (std::size_t i : train_idx) seen[i] = true;
    for (std::size_t i : val_idx) {
        CHECK(!seen[i]);
        seen[i] = true;
    }
    for (bool s : seen) CHECK(s);
}

TEST_CASE("train: solves a linearly separable toy problem") {
    PrngStream gen(41);
    const Dataset data = separable_toy(20, gen);
    PrngStream init(42);
    WeakLearner learner = build_dense_stack(2, {}, 2, LearnerMode::deterministic, init);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.max_epochs = 300;
    cfg.patience = 10;
    cfg.learning_rate = 0.05;
    PrngStream stream(43);
    const auto history = train(learner, data, cfg, stream);
    CHECK(!history.epochs.empty());
    CHECK(history.best_epoch >= 1);
    CHECK(training_accuracy(learner, data) == doctest::Approx(1.0));
}

TEST_CASE("train: same seed reproduces an identical history") {
    PrngStream gen(44);
    const Dataset data = separable_toy(12, gen);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.max_epochs = 12;
    cfg.learning_rate = 0.01;

    PrngStream init_a(45);
    WeakLearner a = build_dense_stack(2, {4}, 2, LearnerMode::deterministic, init_a);
    PrngStream stream_a(46);
    const auto ha = train(a, data, cfg, stream_a);

    PrngStream init_b(45);
    WeakLearner b = build_dense_stack(2, {4}, 2, LearnerMode::deterministic, init_b);
    PrngStream stream_b(46);
    const auto hb = train(b, data, cfg, stream_b);

    REQUIRE(ha.epochs.size() == hb.epochs.size());
    CHECK(ha.best_epoch == hb.best_epoch);
    for (std::size_t e = 0; e < ha.epochs.size(); ++e) {
        CHECK(ha.epochs[e].train_loss == hb.epochs[e].train_loss);
        CHECK(ha.epochs[e].val_loss == hb.epochs[e].val_loss);
    }
    // restored parameters are bit-identical too
    const auto pa = a.snapshot_parameters();
    const auto pb = b.snapshot_parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].values() == pb[i].values());
    }
}

TEST_CASE("train: early stopping restores the best epoch") {
    // a huge learning rate destabilizes training so validation loss worsens
    PrngStream gen(47);
    const Dataset data = separable_toy(12, gen);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.max_epochs = 60;
    cfg.patience = 1;
    cfg.learning_rate = 30.0;
    PrngStream init(48);
    WeakLearner learner = build_dense_stack(2, {4}, 2, LearnerMode::deterministic, init);
    PrngStream stream(49);
    const auto history = train(learner, data, cfg, stream);

    // stopped at the first non-improving epoch after the best one
    CHECK(history.epochs.size() < cfg.max_epochs);
    CHECK(history.epochs.size() == history.best_epoch + 1);

    // the restored parameters reproduce the recorded best validation loss
    std::vector<std::size_t> train_idx, val_idx;
    PrngStream split_stream = PrngStream(49).substream(0);
    stratified_validation_split(data, cfg.validation_fraction, split_stream,
                                train_idx, val_idx);
    Dataset val = data.subset(val_idx);
    std::fill(val.weights.begin(), val.weights.end(), 1.0);
    const Tensor probs = learner.forward(val.features, false, nullptr);
    double nll = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        nll -= std::log(probs.at(i, static_cast<std::size_t>(val.labels[i])));
    }
    nll /= static_cast<double>(val.size());
    CHECK(nll == doctest::Approx(history.epochs[history.best_epoch - 1].val_loss)
                     .epsilon(1e-12));
}

TEST_CASE("train: invalid configs and degenerate splits") {
    PrngStream gen(50);
    const Dataset data = separable_toy(10, gen);
    PrngStream init(51);
    WeakLearner learner = build_dense_stack(2, {}, 2, LearnerMode::deterministic, init);
    PrngStream stream(52);

    TrainConfig bad;
    bad.batch_size = 0;
    CHECK_THROWS_AS(train(learner, data, bad, stream), InvalidParameter);
    bad = TrainConfig{};
    bad.validation_fraction = 0.0;
    CHECK_THROWS_AS(train(learner, data, bad, stream), InvalidParameter);
    bad = TrainConfig{};
    bad.patience = 0;
    CHECK_THROWS_AS(train(learner, data, bad, stream), InvalidParameter);

    // two samples: floor(1 * 0.3) = 0 per class, validation empty
    Tensor tiny_features({2, 2}, {0.0, 0.0, 1.0, 1.0});
    Dataset tiny(tiny_features, {0, 1}, 2);
    TrainConfig cfg;
    CHECK_THROWS_AS(train(learner, tiny, cfg, stream), DataError);
}

TEST_CASE("train: vi learner fits the separable toy") {
    PrngStream gen(53);
    const Dataset data = separable_toy(20, gen);
    PrngStream init(54);
    WeakLearner learner = build_dense_stack(2, {}, 2, LearnerMode::vi, init);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.max_epochs = 200;
    cfg.patience = 20;
    cfg.learning_rate = 0.05;
    PrngStream stream(55);
    train(learner, data, cfg, stream);
    CHECK(training_accuracy(learner, data) >= 0.95);
}
