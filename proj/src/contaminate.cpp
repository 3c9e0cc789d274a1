#include "proboost/contaminate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "proboost/errors.hpp"
#include "proboost/numerics.hpp"

namespace proboost {

namespace {

std::vector<std::size_t> image_tensor_shape(const RawImageSet& set) {
    return {set.count, 1, set.height, set.width};
}

void minmax_normalize_image(double* img, std::size_t n) {
    double lo = img[0], hi = img[0];
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, img[i]);
        hi = std::max(hi, img[i]);
    }
    if (hi == lo) {
        std::fill(img, img + n, 0.0);
        return;
    }
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < n; ++i) img[i] = (img[i] - lo) * inv;
}

}  // namespace

Tensor contaminate_awgn(const RawImageSet& set, const ContaminationSpec& spec,
                        PrngStream& stream) {
    if (spec.kind != ContaminationSpec::Kind::awgn) {
        throw InvalidParameter("contaminate_awgn: spec kind must be awgn");
    }
    if (spec.awgn_variance < 0.0) {
        throw InvalidParameter("contaminate_awgn: variance must be >= 0");
    }
    const double noise_std = std::sqrt(spec.awgn_variance);
    Tensor out(image_tensor_shape(set));
    for (std::size_t i = 0; i < set.pixels.size(); ++i) {
        double v = static_cast<double>(set.pixels[i]) + spec.awgn_mean +
                   noise_std * stream.next_gaussian();
        v = std::clamp(v, 0.0, 255.0);
        out[i] = v / 255.0;
    }
    return out;
}

Tensor normalize_images(const RawImageSet& set) {
    Tensor out(image_tensor_shape(set));
    const std::size_t px = set.height * set.width;
    for (std::size_t i = 0; i < set.pixels.size(); ++i) {
        out[i] = static_cast<double>(set.pixels[i]);
    }
    for (std::size_t s = 0; s < set.count; ++s) {
        minmax_normalize_image(out.data() + s * px, px);
    }
    return out;
}

Tensor contaminate_superimpose(const RawImageSet& base, const RawImageSet& donor,
                               const ContaminationSpec& spec, PrngStream& stream,
                               std::vector<std::pair<int, int>>* pair_log) {
    if (spec.kind != ContaminationSpec::Kind::superimpose) {
        throw InvalidParameter("contaminate_superimpose: spec kind must be superimpose");
    }
    if (spec.fraction <= 0.0 || spec.fraction > 1.0) {
        throw InvalidParameter("contaminate_superimpose: fraction must be in (0, 1]");
    }
    if (donor.height != base.height || donor.width != base.width) {
        throw DataError("contaminate_superimpose: donor image size differs from base");
    }

    // donor pool per class; every base class must be covered
    const int max_label =
        *std::max_element(base.labels.begin(), base.labels.end());
    std::vector<std::vector<std::size_t>> donors_by_class(
        static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < donor.labels.size(); ++i) {
        const int y = donor.labels[i];
        if (y >= 0 && y <= max_label) {
            donors_by_class[static_cast<std::size_t>(y)].push_back(i);
        }
    }
    for (int y : base.labels) {
        if (donors_by_class[static_cast<std::size_t>(y)].empty()) {
            throw DataError("contaminate_superimpose: donor set has no images of class " +
                            std::to_string(y));
        }
    }

    const std::size_t n_selected =
        static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(base.count)));
    const auto order = permutation(stream, base.count);
    std::vector<bool> selected(base.count, false);
    for (std::size_t i = 0; i < n_selected; ++i) selected[order[i]] = true;

    const std::size_t px = base.height * base.width;
    Tensor out(image_tensor_shape(base));
    for (std::size_t s = 0; s < base.count; ++s) {
        double* img = out.data() + s * px;
        for (std::size_t i = 0; i < px; ++i) {
            img[i] = static_cast<double>(base.pixels[s * px + i]);
        }
        if (selected[s]) {
            const auto& pool = donors_by_class[static_cast<std::size_t>(base.labels[s])];
            const std::size_t pick = pool[stream.next_below(pool.size())];
            const std::uint8_t* dimg = donor.pixels.data() + pick * px;
            for (std::size_t i = 0; i < px; ++i) img[i] += static_cast<double>(dimg[i]);
            if (pair_log) pair_log->emplace_back(base.labels[s], donor.labels[pick]);
        }
        minmax_normalize_image(img, px);
    }
    return out;
}

SplitSpec provider_split(std::size_t n_total, std::size_t n_train) {
    if (n_train > n_total) throw DataError("provider_split: n_train exceeds total");
    SplitSpec split;
    split.train_indices.resize(n_train);
    split.test_indices.resize(n_total - n_train);
    for (std::size_t i = 0; i < n_train; ++i) split.train_indices[i] = i;
    for (std::size_t i = n_train; i < n_total; ++i) {
        split.test_indices[i - n_train] = i;
    }
    return split;
}

SplitSpec stratified_subsample(const std::vector<int>& labels, int n_classes,
                               std::size_t n_train, std::size_t n_test,
                               PrngStream& stream) {
    if (n_classes < 1) throw InvalidParameter("stratified_subsample: n_classes < 1");
    const std::size_t k = static_cast<std::size_t>(n_classes);
    if (n_train % k != 0 || n_test % k != 0) {
        throw DataError("stratified_subsample: counts must divide evenly by class count");
    }
    const std::size_t train_per = n_train / k;
    const std::size_t test_per = n_test / k;

    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) {
            throw DataError("stratified_subsample: label out of range");
        }
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }

    SplitSpec split;
    for (std::size_t c = 0; c < k; ++c) {
        auto& pool = by_class[c];
        if (pool.size() < train_per + test_per) {
            throw DataError("stratified_subsample: class " + std::to_string(c) +
                            " has only " + std::to_string(pool.size()) + " samples, needs " +
                            std::to_string(train_per + test_per));
        }
        const auto order = permutation(stream, pool.size());
        for (std::size_t i = 0; i < train_per; ++i) {
            split.train_indices.push_back(pool[order[i]]);
        }
        for (std::size_t i = 0; i < test_per; ++i) {
            split.test_indices.push_back(pool[order[train_per + i]]);
        }
    }
    return split;
}

std::pair<Dataset, Dataset> train_test_interface(const Tensor& features,
                                                 const std::vector<int>& labels,
                                                 int n_classes, const SplitSpec& split) {
    if (features.rank() < 1 || features.dim(0) != labels.size()) {
        throw DataError("train_test_interface: features and labels misaligned");
    }
    std::set<std::size_t> train_set(split.train_indices.begin(),
                                    split.train_indices.end());
    for (std::size_t i : split.test_indices) {
        if (train_set.count(i)) {
            throw DataError("train_test_interface: sample " + std::to_string(i) +
                            " appears in both splits");
        }
    }
    Dataset all(features, labels, n_classes);
    return {all.subset(split.train_indices), all.subset(split.test_indices)};
}

}  // namespace proboost
