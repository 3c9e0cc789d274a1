#include "proboost/prng.hpp"

#include <cmath>

#include "proboost/errors.hpp"

namespace proboost {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

PrngStream::PrngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    key_ = mix64(mix64(seed + kGolden) ^ (stream_id * 0xDA942042E4DD58B5ULL));
}

std::uint64_t PrngStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double PrngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PrngStream::next_gaussian() {
    // u1 in (0, 1] keeps the log finite; the sine branch is discarded so each
    // draw consumes exactly two words regardless of call history.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

std::uint64_t PrngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw InvalidParameter("next_below: bound must be > 0");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

double PrngStream::next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

PrngStream PrngStream::substream(std::uint64_t child_id) const {
    return PrngStream(key_, mix64(stream_id_ * kGolden + child_id + 1));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(seed + a * kGolden) ^ (b * 0xDA942042E4DD58B5ULL));
}

}  // namespace proboost
