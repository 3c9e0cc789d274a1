#include <doctest.h>

#include <cmath>
#include <vector>

#include "proboost/errors.hpp"
#include "proboost/metrics.hpp"
#include "proboost/prng.hpp"

using namespace proboost;

TEST_CASE("macro_metrics: perfect predictions give 1.0 everywhere") {
    const std::vector<int> y = {0, 1, 2, 0, 1, 2};
    const auto report = macro_metrics(y, y, 3);
    CHECK(report.acc == doctest::Approx(1.0));
    CHECK(report.sen == doctest::Approx(1.0));
    CHECK(report.spe == doctest::Approx(1.0));
    CHECK(report.ppv == doctest::Approx(1.0));
    CHECK(report.npv == doctest::Approx(1.0));
    CHECK(report.flagged_classes.empty());
}

TEST_CASE("macro_metrics: hand-counted six-sample confusion") {
    const std::vector<int> y_true = {0, 0, 1, 1, 2, 2};
    const std::vector<int> y_pred = {0, 1, 1, 1, 2, 0};
    const auto report = macro_metrics(y_true, y_pred, 3);
    const auto& c0 = report.per_class[0];
    CHECK(c0.sen == doctest::Approx(0.5));
    CHECK(c0.spe == doctest::Approx(0.75));
    CHECK(c0.ppv == doctest::Approx(0.5));
    CHECK(c0.npv == doctest::Approx(0.75));
    // raw confusion counts
    const auto counts = ova_confusion(y_true, y_pred, 0);
    CHECK(counts.tp == 1);
    CHECK(counts.fn == 1);
    CHECK(counts.fp == 1);
    CHECK(counts.tn == 3);
    CHECK(counts.total() == 6);
}

TEST_CASE("macro_metrics: all-one-class predictor on balanced data has macro Sen 1/K") {
    const std::vector<int> y_true = {0, 0, 1, 1, 2, 2, 3, 3};
    const std::vector<int> y_pred(8, 2);
    const auto report = macro_metrics(y_true, y_pred, 4);
    CHECK(report.sen == doctest::Approx(0.25));
    // classes never predicted have an empty predicted-positive set
    CHECK(!report.flagged_classes.empty());
}

TEST_CASE("macro_metrics: fewer than two classes rejected") {
    CHECK_THROWS_AS(macro_metrics({0, 0}, {0, 0}, 1), InvalidParameter);
}

namespace {

// pairwise Mann-Whitney brute force, ties count one half
double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels,
                    int cls) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != cls) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == cls) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("auc_ova: separable, tied, and hand-counted binary cases") {
    // perfectly separating scores
    Tensor s1({4, 2}, {0.9, 0.1, 0.8, 0.2, 0.1, 0.9, 0.2, 0.8});
    CHECK(auc_ova(s1, {0, 0, 1, 1}) == doctest::Approx(1.0));

    // all scores identical -> pure ties
    Tensor s2({4, 2}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(auc_ova(s2, {0, 0, 1, 1}) == doctest::Approx(0.5));

    // positives scored [0.8, 0.4], negatives [0.6, 0.2] -> 3/4
    const double got = auc_pairwise({0.8, 0.4, 0.6, 0.2}, {1, 1, 0, 0}, 1);
    CHECK(got == doctest::Approx(0.75));
    Tensor s4({4, 2}, {0.2, 0.8, 0.6, 0.4, 0.4, 0.6, 0.8, 0.2});
    std::vector<std::size_t> skipped;
    const double macro = auc_ova(s4, {1, 1, 0, 0}, &skipped);
    CHECK(skipped.empty());
    // class 0 column is the complement, same AUC by symmetry
    CHECK(macro == doctest::Approx(0.75));
}

TEST_CASE("auc_ova: matches the pairwise brute force on random binary instances") {
    PrngStream stream(21);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 5 + stream.next_below(40);
        Tensor scores({n, 2});
        std::vector<int> labels(n);
        bool has_both = false;
        for (std::size_t i = 0; i < n; ++i) {
            // quantized scores force ties
            const double p = static_cast<double>(stream.next_below(11)) / 10.0;
            scores.at(i, 0) = 1.0 - p;
            scores.at(i, 1) = p;
            labels[i] = static_cast<int>(stream.next_below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        has_both = true;
        REQUIRE(has_both);

        std::vector<double> col1(n);
        for (std::size_t i = 0; i < n; ++i) col1[i] = scores.at(i, 1);
        std::vector<double> col0(n);
        for (std::size_t i = 0; i < n; ++i) col0[i] = scores.at(i, 0);
        const double expected =
            0.5 * (auc_pairwise(col0, labels, 0) + auc_pairwise(col1, labels, 1));
        CHECK(auc_ova(scores, labels) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("auc_ova: strictly increasing transforms leave the result unchanged") {
    PrngStream stream(33);
    Tensor scores({30, 3});
    std::vector<int> labels(30);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 3; ++j) scores.at(i, j) = stream.next_uniform();
        labels[i] = static_cast<int>(stream.next_below(3));
    }
    labels[0] = 0;
    labels[1] = 1;
    labels[2] = 2;
    Tensor transformed = scores;
    for (std::size_t i = 0; i < transformed.size(); ++i) {
        transformed[i] = std::exp(3.0 * transformed[i]) + 2.0;
    }
    CHECK(auc_ova(scores, labels) ==
          doctest::Approx(auc_ova(transformed, labels)).epsilon(1e-12));
}

TEST_CASE("auc_ova: classes absent from the labels are skipped and flagged") {
    Tensor scores({4, 3}, {0.7, 0.2, 0.1, 0.6, 0.3, 0.1, 0.2, 0.7, 0.1, 0.1, 0.8, 0.1});
    std::vector<std::size_t> skipped;
    const double macro = auc_ova(scores, {0, 0, 1, 1}, &skipped);
    CHECK(skipped == std::vector<std::size_t>{2});
    CHECK(macro >= 0.0);
    CHECK(macro <= 1.0);
}

TEST_CASE("macro_metrics: equal class counts make macro Sen the micro accuracy") {
    PrngStream stream(44);
    const int k = 4;
    const std::size_t per_class = 12;
    std::vector<int> y_true, y_pred;
    for (std::size_t i = 0; i < per_class * k; ++i) {
        y_true.push_back(static_cast<int>(i % k));
        y_pred.push_back(static_cast<int>(stream.next_below(k)));
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == y_pred[i]) ++hits;
    }
    const double micro = static_cast<double>(hits) / static_cast<double>(y_true.size());
    const auto report = macro_metrics(y_true, y_pred, k);
    CHECK(report.sen == doctest::Approx(micro).epsilon(1e-12));
}
