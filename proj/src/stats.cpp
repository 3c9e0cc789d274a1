#include "proboost/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "proboost/errors.hpp"

namespace proboost {

RunSummary summarize_runs(const std::vector<double>& values) {
    if (values.size() < 2) {
        throw InvalidParameter("summarize_runs: need at least 2 values");
    }
    RunSummary s;
    s.n = values.size();
    const double n = static_cast<double>(s.n);
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / (n - 1.0));
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    const double half_width = 1.96 * s.std_dev / std::sqrt(n);
    s.ci_low = s.mean - half_width;
    s.ci_high = s.mean + half_width;
    return s;
}

double roi(double result_a, double result_b) {
    if (result_a >= 1.0) {
        throw InvalidParameter("roi: baseline result must be < 1");
    }
    return (result_b - result_a) / (1.0 - result_a);
}

namespace {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz algorithm.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) {
        throw InvalidParameter("regularized_incomplete_beta: a, b must be > 0");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double t, double df) {
    if (df <= 0.0) throw InvalidParameter("student_t_upper_tail: df must be > 0");
    const double x = df / (df + t * t);
    const double half_tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

double paired_t_test_one_tailed(const std::vector<double>& baseline,
                                const std::vector<double>& treatment) {
    if (baseline.size() != treatment.size() || baseline.size() < 2) {
        throw InvalidParameter(
            "paired_t_test_one_tailed: need equal-length lists with >= 2 pairs");
    }
    const std::size_t n = baseline.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = treatment[i] - baseline[i];

    double mean_d = 0.0;
    for (double d : diff) mean_d += d;
    mean_d /= static_cast<double>(n);
    double ss = 0.0;
    for (double d : diff) ss += (d - mean_d) * (d - mean_d);
    const double sd = std::sqrt(ss / (static_cast<double>(n) - 1.0));
    if (sd == 0.0) {
        throw DegenerateDifferences(
            "paired_t_test_one_tailed: differences have zero variance");
    }
    const double t = mean_d / (sd / std::sqrt(static_cast<double>(n)));
    return student_t_upper_tail(t, static_cast<double>(n) - 1.0);
}

}  // namespace proboost
