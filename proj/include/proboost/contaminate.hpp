#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "proboost/dataset.hpp"
#include "proboost/idx.hpp"
#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"

namespace proboost {

struct ContaminationSpec {
    enum class Kind { awgn, superimpose };
    Kind kind = Kind::awgn;
    double awgn_mean = 255.0 / 2.0;
    double awgn_variance = 255.0 / 2.0;  // variance, not std
    double fraction = 0.25;              // share of samples receiving a donor image
};

/// Per-pixel additive white Gaussian noise with the spec'd mean/variance,
/// clipped to [0, 255] and then scaled to [0, 1]. Output shape [n, 1, H, W].
Tensor contaminate_awgn(const RawImageSet& set, const ContaminationSpec& spec,
                        PrngStream& stream);

/// Superimpose a same-class donor image onto floor(fraction * n) randomly
/// selected base images (pixel-wise addition), then min-max normalize every
/// image individually to [0, 1]. Unselected images are min-max normalized
/// alone. A base class with no donor images raises DataError. When pair_log is
/// non-null it receives one (base_label, donor_label) pair per blended image.
Tensor contaminate_superimpose(const RawImageSet& base, const RawImageSet& donor,
                               const ContaminationSpec& spec, PrngStream& stream,
                               std::vector<std::pair<int, int>>* pair_log = nullptr);

/// Plain min-max per-image normalization of uncontaminated pixels to [0, 1].
/// Constant images (min == max) normalize to all zeros.
Tensor normalize_images(const RawImageSet& set);

struct SplitSpec {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Provider split: the first n_train samples are training, the rest test.
SplitSpec provider_split(std::size_t n_total, std::size_t n_train);

/// Seeded stratified subsample with exactly n_train/K training and n_test/K
/// test samples per class, drawn disjointly. Counts must divide evenly by the
/// class count and every class needs enough samples, else DataError.
SplitSpec stratified_subsample(const std::vector<int>& labels, int n_classes,
                               std::size_t n_train, std::size_t n_test,
                               PrngStream& stream);

/// Materialize (train, test) datasets from a split. Overlapping or
/// out-of-range indices raise DataError.
std::pair<Dataset, Dataset> train_test_interface(const Tensor& features,
                                                 const std::vector<int>& labels,
                                                 int n_classes, const SplitSpec& split);

}  // namespace proboost
