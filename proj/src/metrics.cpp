#include "proboost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "proboost/errors.hpp"

namespace proboost {

ConfusionCounts ova_confusion(const std::vector<int>& labels_true,
                              const std::vector<int>& labels_pred, int cls) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels_true.size(); ++i) {
        const bool actual = labels_true[i] == cls;
        const bool predicted = labels_pred[i] == cls;
        if (actual && predicted) ++c.tp;
        else if (!actual && predicted) ++c.fp;
        else if (actual && !predicted) ++c.fn;
        else ++c.tn;
    }
    return c;
}

namespace {

double ratio_or_zero(double num, double den, bool& flagged) {
    if (den == 0.0) {
        flagged = true;
        return 0.0;
    }
    return num / den;
}

}  // namespace

MetricsReport macro_metrics(const std::vector<int>& labels_true,
                            const std::vector<int>& labels_pred, int n_classes) {
    if (n_classes < 2) throw InvalidParameter("macro_metrics: need at least 2 classes");
    if (labels_true.empty() || labels_true.size() != labels_pred.size()) {
        throw InvalidParameter("macro_metrics: label lists must be non-empty and aligned");
    }

    MetricsReport report;
    report.per_class.resize(static_cast<std::size_t>(n_classes));
    for (int cls = 0; cls < n_classes; ++cls) {
        const ConfusionCounts c = ova_confusion(labels_true, labels_pred, cls);
        ClassMetrics& m = report.per_class[static_cast<std::size_t>(cls)];
        bool flagged = false;
        m.acc = ratio_or_zero(static_cast<double>(c.tp + c.tn),
                              static_cast<double>(c.total()), flagged);
        m.sen = ratio_or_zero(static_cast<double>(c.tp),
                              static_cast<double>(c.tp + c.fn), flagged);
        m.spe = ratio_or_zero(static_cast<double>(c.tn),
                              static_cast<double>(c.tn + c.fp), flagged);
        m.ppv = ratio_or_zero(static_cast<double>(c.tp),
                              static_cast<double>(c.tp + c.fp), flagged);
        m.npv = ratio_or_zero(static_cast<double>(c.tn),
                              static_cast<double>(c.tn + c.fn), flagged);
        m.undefined_ratio = flagged;
        if (flagged) report.flagged_classes.push_back(static_cast<std::size_t>(cls));

        report.acc += m.acc;
        report.sen += m.sen;
        report.spe += m.spe;
        report.ppv += m.ppv;
        report.npv += m.npv;
    }
    const double k = static_cast<double>(n_classes);
    report.acc /= k;
    report.sen /= k;
    report.spe /= k;
    report.ppv /= k;
    report.npv /= k;
    report.auc = std::numeric_limits<double>::quiet_NaN();
    return report;
}

namespace {

// Mann-Whitney AUC of one score column, positives = (label == cls).
// Average ranks handle ties, so tied pairs count one half.
double binary_rank_auc(const Tensor& scores, const std::vector<int>& labels_true,
                       int cls, std::size_t col) {
    const std::size_t n = labels_true.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores.at(a, col) < scores.at(b, col);
    });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores.at(order[j], col) == scores.at(order[i], col)) ++j;
        // ranks i+1 .. j share the average rank
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (labels_true[order[t]] == cls) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (labels_true[t] == cls) ++n_pos;
        else ++n_neg;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                        static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace

double auc_ova(const Tensor& scores, const std::vector<int>& labels_true,
               std::vector<std::size_t>* skipped_classes) {
    if (scores.rank() != 2) throw ShapeError("auc_ova: scores must be batch x K");
    if (scores.dim(0) != labels_true.size()) {
        throw ShapeError("auc_ova: scores rows must match label count");
    }
    const std::size_t k = scores.dim(1);
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t cls = 0; cls < k; ++cls) {
        std::size_t n_pos = 0;
        for (int y : labels_true) {
            if (y == static_cast<int>(cls)) ++n_pos;
        }
        const std::size_t n_neg = labels_true.size() - n_pos;
        if (n_pos == 0 || n_neg == 0) {
            if (skipped_classes) skipped_classes->push_back(cls);
            continue;
        }
        total += binary_rank_auc(scores, labels_true, static_cast<int>(cls), cls);
        ++used;
    }
    if (used == 0) throw DataError("auc_ova: no class has both positives and negatives");
    return total / static_cast<double>(used);
}

}  // namespace proboost
