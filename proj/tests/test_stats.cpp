#include <doctest.h>

#include <cmath>
#include <vector>

#include "proboost/errors.hpp"
#include "proboost/stats.hpp"

using namespace proboost;

TEST_CASE("summarize_runs: hand arithmetic and degenerate cases") {
    const auto s = summarize_runs({1.0, 3.0});
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.std_dev == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 3.0);

    const auto c = summarize_runs({5.0, 5.0, 5.0});
    CHECK(c.std_dev == 0.0);
    CHECK(c.ci_low == doctest::Approx(5.0));
    CHECK(c.ci_high == doctest::Approx(5.0));

    CHECK_THROWS_AS(summarize_runs({1.0}), InvalidParameter);
}

TEST_CASE("summarize_runs: z-interval from mean 97.20, std 0.04, n 10") {
    // construct 10 values with exactly this sample mean and std
    const double mu = 97.20, sigma = 0.04;
    const double c = std::sqrt(9.0 / 10.0);  // alternating +-1 has sample std 1/c
    std::vector<double> values(10);
    for (int i = 0; i < 10; ++i) {
        values[static_cast<std::size_t>(i)] = mu + sigma * c * (i % 2 == 0 ? 1.0 : -1.0);
    }
    const auto s = summarize_runs(values);
    CHECK(s.mean == doctest::Approx(mu).epsilon(1e-12));
    CHECK(s.std_dev == doctest::Approx(sigma).epsilon(1e-9));
    const double half = 1.96 * sigma / std::sqrt(10.0);
    CHECK(s.ci_low == doctest::Approx(mu - half).epsilon(1e-9));
    CHECK(s.ci_high == doctest::Approx(mu + half).epsilon(1e-9));
    // the printed Table-1 interval is the 2-decimal rendering of this
    CHECK(std::abs(s.ci_low - 97.18) < 0.01);
    CHECK(std::abs(s.ci_high - 97.23) < 0.01);
}

TEST_CASE("roi: worked values, identity, and error") {
    CHECK(roi(0.60, 0.61) == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(roi(0.98, 0.99) == doctest::Approx(0.50).epsilon(1e-12));
    CHECK(roi(0.4, 0.4) == 0.0);
    CHECK(roi(0.7, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(roi(1.0, 0.5), InvalidParameter);
    CHECK_THROWS_AS(roi(1.2, 0.5), InvalidParameter);
}

TEST_CASE("roi: strictly increasing in the treatment result") {
    double prev = roi(0.5, 0.0);
    for (double b = 0.05; b <= 1.0; b += 0.05) {
        const double r = roi(0.5, b);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("regularized_incomplete_beta: closed forms and symmetry") {
    // I_x(1,1) = x, I_x(2,1) = x^2
    for (double x : {0.1, 0.37, 0.5, 0.93}) {
        CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
        CHECK(regularized_incomplete_beta(2.0, 1.0, x) ==
              doctest::Approx(x * x).epsilon(1e-12));
        CHECK(regularized_incomplete_beta(0.5, 2.5, x) ==
              doctest::Approx(1.0 - regularized_incomplete_beta(2.5, 0.5, 1.0 - x))
                  .epsilon(1e-10));
    }
    CHECK(regularized_incomplete_beta(3.0, 4.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(3.0, 4.0, 1.0) == 1.0);
}

TEST_CASE("student_t_upper_tail: matches df=1 and df=2 closed forms to 1e-8") {
    for (double t : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.5, 3.4641016151377544, 10.0}) {
        const double cauchy = 0.5 - std::atan(t) / M_PI;
        CHECK(student_t_upper_tail(t, 1.0) == doctest::Approx(cauchy).epsilon(1e-8));
        const double df2 = 0.5 * (1.0 - t / std::sqrt(2.0 + t * t));
        CHECK(student_t_upper_tail(t, 2.0) == doctest::Approx(df2).epsilon(1e-8));
    }
}

TEST_CASE("paired_t_test_one_tailed: documented three-pair case") {
    const std::vector<double> baseline = {1.0, 2.0, 3.0};
    const std::vector<double> treatment = {1.5, 3.0, 4.5};
    const double p = paired_t_test_one_tailed(baseline, treatment);
    CHECK(std::abs(p - 0.037) < 0.001);

    // swapping the arguments maps p to 1 - p
    const double q = paired_t_test_one_tailed(treatment, baseline);
    CHECK(p + q == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("paired_t_test_one_tailed: degenerate and invalid inputs") {
    CHECK_THROWS_AS(paired_t_test_one_tailed({1.0, 2.0}, {1.0, 2.0}),
                    DegenerateDifferences);
    CHECK_THROWS_AS(paired_t_test_one_tailed({1.0, 2.0, 2.5}, {2.0, 3.0, 3.5}),
                    DegenerateDifferences);
    CHECK_THROWS_AS(paired_t_test_one_tailed({1.0}, {2.0}), InvalidParameter);
    CHECK_THROWS_AS(paired_t_test_one_tailed({1.0, 2.0}, {2.0}), InvalidParameter);
}

TEST_CASE("paired_t_test_one_tailed: p lies in (0,1) for non-degenerate inputs") {
    const double p1 = paired_t_test_one_tailed({0.0, 0.0, 0.0, 0.0},
                                               {1.0, 1.1, 0.9, 1.05});
    CHECK(p1 > 0.0);
    CHECK(p1 < 0.05);
    const double p2 = paired_t_test_one_tailed({1.0, 1.1, 0.9, 1.05},
                                               {0.0, 0.0, 0.0, 0.0});
    CHECK(p2 > 0.95);
    CHECK(p2 < 1.0);
}
