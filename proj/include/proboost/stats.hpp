#pragma once

#include <vector>

namespace proboost {

/// Summary of a repeated-run metric: mean, sample std, extremes, and the
/// 1.96-sigma normal-approximation confidence interval.
struct RunSummary {
    double mean = 0.0;
    double std_dev = 0.0;  // n-1 denominator
    double min = 0.0;
    double max = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
};

RunSummary summarize_runs(const std::vector<double>& values);

/// Relative obtainable improvement (result_b - result_a) / (1 - result_a).
/// result_a >= 1 raises InvalidParameter.
double roi(double result_a, double result_b);

/// Upper-tail p-value of the paired one-tailed t-test with alternative
/// mean(treatment) > mean(baseline). Differences with zero variance raise
/// DegenerateDifferences.
double paired_t_test_one_tailed(const std::vector<double>& baseline,
                                const std::vector<double>& treatment);

/// P(T > t) for Student's t with df degrees of freedom.
double student_t_upper_tail(double t, double df);

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace proboost
