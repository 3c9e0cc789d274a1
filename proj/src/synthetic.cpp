#include "proboost/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "proboost/errors.hpp"
#include "proboost/numerics.hpp"

namespace proboost {

RawImageSet make_synthetic_image_set(std::size_t n, std::size_t height,
                                     std::size_t width, int n_classes,
                                     PrngStream& stream, double jitter_std,
                                     double contrast) {
    if (n_classes < 2) throw InvalidParameter("make_synthetic_image_set: need >= 2 classes");
    if (height == 0 || width == 0) {
        throw InvalidParameter("make_synthetic_image_set: empty image dims");
    }
    const std::size_t k = static_cast<std::size_t>(n_classes);
    const std::size_t per_class = n / k;
    if (per_class == 0) throw InvalidParameter("make_synthetic_image_set: n < n_classes");

    const std::size_t px = height * width;

    // Per-class prototype: sum of two low-frequency separable waves.
    std::vector<std::vector<double>> prototypes(k, std::vector<double>(px));
    for (std::size_t c = 0; c < k; ++c) {
        const double f1 = 1.0 + stream.next_below(3);
        const double f2 = 1.0 + stream.next_below(3);
        const double f3 = 1.0 + stream.next_below(4);
        const double p1 = stream.next_uniform() * 2.0 * M_PI;
        const double p2 = stream.next_uniform() * 2.0 * M_PI;
        const double p3 = stream.next_uniform() * 2.0 * M_PI;
        const double a1 = contrast * (55.0 + 35.0 * stream.next_uniform());
        const double a2 = contrast * (35.0 + 30.0 * stream.next_uniform());
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t col = 0; col < width; ++col) {
                const double y = static_cast<double>(r) / static_cast<double>(height);
                const double x = static_cast<double>(col) / static_cast<double>(width);
                double v = 127.5;
                v += a1 * std::sin(2.0 * M_PI * f1 * y + p1) *
                     std::cos(2.0 * M_PI * f2 * x + p2);
                v += a2 * std::sin(2.0 * M_PI * f3 * (x + y) + p3);
                prototypes[c][r * width + col] = v;
            }
        }
    }

    RawImageSet set;
    set.count = per_class * k;
    set.height = height;
    set.width = width;
    set.pixels.resize(set.count * px);
    set.labels.resize(set.count);

    // Interleave classes so any prefix is close to balanced, then jitter.
    for (std::size_t i = 0; i < set.count; ++i) {
        const std::size_t c = i % k;
        set.labels[i] = static_cast<int>(c);
        for (std::size_t j = 0; j < px; ++j) {
            double v = prototypes[c][j] + jitter_std * stream.next_gaussian();
            v = std::clamp(v, 0.0, 255.0);
            set.pixels[i * px + j] = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return set;
}

}  // namespace proboost
