#include "proboost/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "proboost/errors.hpp"

namespace proboost {

Tensor gaussian_sample(PrngStream& stream, double mean, double std_dev,
                       const std::vector<std::size_t>& shape) {
    if (std_dev < 0.0) throw InvalidParameter("gaussian_sample: std must be >= 0");
    Tensor out(shape);
    if (std_dev == 0.0) {
        out.fill(mean);
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = mean + std_dev * stream.next_gaussian();
    }
    return out;
}

std::vector<std::size_t> permutation(PrngStream& stream, std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = stream.next_below(i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

std::vector<std::size_t> stable_argsort_ascending(const std::vector<double>& values) {
    for (double v : values) {
        if (std::isnan(v)) throw InvalidParameter("stable_argsort_ascending: NaN input");
    }
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return idx;
}

}  // namespace proboost
