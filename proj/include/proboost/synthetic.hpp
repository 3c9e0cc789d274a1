#pragma once

#include <cstddef>

#include "proboost/idx.hpp"
#include "proboost/prng.hpp"

namespace proboost {

/// Seeded synthetic gray-scale image set: each class gets a smooth random
/// prototype pattern and samples are the prototype plus per-pixel Gaussian
/// jitter, quantized to [0, 255]. Classes are balanced (n rounded down to a
/// multiple of n_classes). contrast scales the prototype wave amplitudes, so
/// contrast/jitter together set the task difficulty. Useful for
/// self-contained pipeline runs when no external image files are available.
RawImageSet make_synthetic_image_set(std::size_t n, std::size_t height,
                                     std::size_t width, int n_classes,
                                     PrngStream& stream, double jitter_std = 32.0,
                                     double contrast = 1.0);

}  // namespace proboost
