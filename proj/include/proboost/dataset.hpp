#pragma once

#include <cstddef>
#include <vector>

#include "proboost/tensor.hpp"

namespace proboost {

/// Labeled sample collection with per-sample training weights. Dimension 0 of
/// features indexes samples; labels and weights are aligned with it. Weights
/// start at one and only ever grow (weighted boosting increments them).
struct Dataset {
    Tensor features;
    std::vector<int> labels;
    std::vector<double> weights;
    int n_classes = 0;

    Dataset() = default;
    Dataset(Tensor features, std::vector<int> labels, int n_classes);
    Dataset(Tensor features, std::vector<int> labels, std::vector<double> weights,
            int n_classes);

    std::size_t size() const { return labels.size(); }
    std::size_t sample_elements() const {
        return size() == 0 ? 0 : features.size() / size();
    }
    /// Shape of one sample (features shape without the batch dimension).
    std::vector<std::size_t> sample_shape() const;

    /// Gather rows; out-of-range indices raise DataError. Duplicates allowed.
    Dataset subset(const std::vector<std::size_t>& indices) const;

    /// Count of samples per class label.
    std::vector<std::size_t> class_counts() const;
};

}  // namespace proboost
