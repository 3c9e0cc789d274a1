#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "proboost/errors.hpp"
#include "proboost/numerics.hpp"
#include "proboost/prng.hpp"

using namespace proboost;

TEST_CASE("gaussian_sample: zero std returns the constant mean") {
    PrngStream stream(7);
    const Tensor t = gaussian_sample(stream, 0.0, 0.0, {3});
    CHECK(t.shape() == std::vector<std::size_t>{3});
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == 0.0);

    PrngStream stream2(7);
    const Tensor t2 = gaussian_sample(stream2, 4.5, 0.0, {2, 2});
    for (std::size_t i = 0; i < t2.size(); ++i) CHECK(t2[i] == 4.5);
}

TEST_CASE("gaussian_sample: negative std rejected") {
    PrngStream stream(7);
    CHECK_THROWS_AS(gaussian_sample(stream, 0.0, -1.0, {3}), InvalidParameter);
}

TEST_CASE("gaussian_sample: sample mean and variance near N(0,1) at n=1e5") {
    PrngStream stream(1);
    const std::size_t n = 100000;
    const Tensor t = gaussian_sample(stream, 0.0, 1.0, {n});
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += t[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (t[i] - mean) * (t[i] - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("prng: identical (seed, stream_id) replays byte-identical draws") {
    PrngStream a(1, 0);
    PrngStream b(1, 0);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    PrngStream g1(42, 3), g2(42, 3);
    for (int i = 0; i < 50; ++i) CHECK(g1.next_gaussian() == g2.next_gaussian());
}

TEST_CASE("prng: distinct stream ids diverge") {
    PrngStream a(1, 0);
    PrngStream b(1, 1);
    int same = 0;
    for (int i = 0; i < 64; ++i) {
        if (a.next_u64() == b.next_u64()) ++same;
    }
    CHECK(same == 0);
}

TEST_CASE("prng: substream derivation is deterministic and independent") {
    PrngStream base(9, 2);
    PrngStream c1 = base.substream(5);
    PrngStream c2 = base.substream(5);
    PrngStream c3 = base.substream(6);
    const auto x1 = c1.next_u64();
    CHECK(x1 == c2.next_u64());
    CHECK(x1 != c3.next_u64());
}

TEST_CASE("permutation: edge cases and bijection property") {
    PrngStream stream(3);
    CHECK(permutation(stream, 0).empty());
    CHECK(permutation(stream, 1) == std::vector<std::size_t>{0});

    for (std::size_t n : {5u, 17u, 100u}) {
        auto p = permutation(stream, n);
        auto sorted = p;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
    }
}

TEST_CASE("stable_argsort_ascending: hand case and edges") {
    CHECK(stable_argsort_ascending({3.0, 1.0, 2.0, 1.0}) ==
          std::vector<std::size_t>{1, 3, 2, 0});
    CHECK(stable_argsort_ascending({}).empty());
    CHECK(stable_argsort_ascending({1.0, 2.0, 3.0}) ==
          std::vector<std::size_t>{0, 1, 2});
    CHECK_THROWS_AS(stable_argsort_ascending({1.0, std::nan("")}), InvalidParameter);
}

TEST_CASE("stable_argsort_ascending: ties keep original relative order") {
    PrngStream stream(11);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> values(50);
        for (double& v : values) {
            v = static_cast<double>(stream.next_below(8));  // many duplicates
        }
        const auto order = stable_argsort_ascending(values);
        for (std::size_t a = 0; a + 1 < order.size(); ++a) {
            CHECK(values[order[a]] <= values[order[a + 1]]);
            if (values[order[a]] == values[order[a + 1]]) {
                CHECK(order[a] < order[a + 1]);
            }
        }
    }
}
