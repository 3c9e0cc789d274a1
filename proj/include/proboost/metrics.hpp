#pragma once

#include <cstddef>
#include <vector>

#include "proboost/tensor.hpp"

namespace proboost {

/// One-vs-all confusion counts for a single class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

struct ClassMetrics {
    double acc = 0.0;
    double sen = 0.0;
    double spe = 0.0;
    double ppv = 0.0;
    double npv = 0.0;
    bool undefined_ratio = false;  // some 0/0 ratio was coerced to 0
};

/// Macro one-vs-all metrics. auc is NaN until filled by auc_ova.
struct MetricsReport {
    double acc = 0.0;
    double sen = 0.0;
    double spe = 0.0;
    double ppv = 0.0;
    double npv = 0.0;
    double auc = 0.0;
    std::vector<ClassMetrics> per_class;
    std::vector<std::size_t> flagged_classes;  // classes with a coerced 0/0 ratio
};

ConfusionCounts ova_confusion(const std::vector<int>& labels_true,
                              const std::vector<int>& labels_pred, int cls);

/// Acc/Sen/Spe/PPV/NPV per class (OvA binarization), macro-averaged without
/// class weighting. Undefined 0/0 ratios contribute 0 and flag the class.
/// K < 2 raises InvalidParameter. The auc field is left NaN.
MetricsReport macro_metrics(const std::vector<int>& labels_true,
                            const std::vector<int>& labels_pred, int n_classes);

/// Macro one-vs-all AUC via the rank-based Mann-Whitney statistic (ties count
/// one half). Classes absent from labels_true (or with no negatives) are
/// skipped; their indices are appended to skipped_classes when non-null.
double auc_ova(const Tensor& scores, const std::vector<int>& labels_true,
               std::vector<std::size_t>* skipped_classes = nullptr);

}  // namespace proboost
