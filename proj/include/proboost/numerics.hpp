#pragma once

#include <cstddef>
#include <vector>

#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"

namespace proboost {

/// Tensor of i.i.d. N(mean, std^2) draws. std == 0 returns the constant mean;
/// negative std raises InvalidParameter.
Tensor gaussian_sample(PrngStream& stream, double mean, double std_dev,
                       const std::vector<std::size_t>& shape);

/// Uniformly random permutation of 0..n-1 (Fisher-Yates over the stream).
std::vector<std::size_t> permutation(PrngStream& stream, std::size_t n);

/// Indices ordering values ascending; equal values keep their original
/// relative order. NaN input raises InvalidParameter.
std::vector<std::size_t> stable_argsort_ascending(const std::vector<double>& values);

}  // namespace proboost
