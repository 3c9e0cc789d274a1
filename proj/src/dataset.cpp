#include "proboost/dataset.hpp"

#include <algorithm>
#include <string>

#include "proboost/errors.hpp"

namespace proboost {

namespace {

void validate(const Dataset& d) {
    if (d.features.rank() < 1 || d.features.dim(0) != d.labels.size() ||
        d.labels.size() != d.weights.size()) {
        throw DataError("dataset: features, labels, and weights must be aligned");
    }
    for (int y : d.labels) {
        if (y < 0 || y >= d.n_classes) {
            throw DataError("dataset: label " + std::to_string(y) +
                            " outside [0, " + std::to_string(d.n_classes) + ")");
        }
    }
    for (double w : d.weights) {
        if (w < 1.0) throw DataError("dataset: sample weights must be >= 1");
    }
}

}  // namespace

Dataset::Dataset(Tensor feat, std::vector<int> lab, int k)
    : features(std::move(feat)), labels(std::move(lab)),
      weights(labels.size(), 1.0), n_classes(k) {
    validate(*this);
}

Dataset::Dataset(Tensor feat, std::vector<int> lab, std::vector<double> wts, int k)
    : features(std::move(feat)), labels(std::move(lab)), weights(std::move(wts)),
      n_classes(k) {
    validate(*this);
}

std::vector<std::size_t> Dataset::sample_shape() const {
    std::vector<std::size_t> s(features.shape().begin() + 1, features.shape().end());
    return s;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    const std::size_t stride = sample_elements();
    std::vector<std::size_t> new_shape = features.shape();
    new_shape[0] = std::max<std::size_t>(indices.size(), 1);
    if (indices.empty()) throw DataError("dataset subset: empty index list");

    Tensor feat(new_shape);
    std::vector<int> lab(indices.size());
    std::vector<double> wts(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        if (src >= size()) throw DataError("dataset subset: index out of range");
        std::copy_n(features.data() + src * stride, stride, feat.data() + i * stride);
        lab[i] = labels[src];
        wts[i] = weights[src];
    }
    return Dataset(std::move(feat), std::move(lab), std::move(wts), n_classes);
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

}  // namespace proboost
