#pragma once

#include <cstdint>

namespace proboost {

/// Counter-based deterministic random stream. A stream is fully identified by
/// (seed, stream_id): replaying the same pair yields byte-identical draws on
/// every platform. Independent work units must take their own stream via
/// substream() instead of sharing one generator.
class PrngStream {
public:
    explicit PrngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    /// Uniform draw in [0, 1).
    double next_uniform();

    /// Standard normal draw (Box-Muller; two u64 draws per value).
    double next_gaussian();

    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound);

    /// Uniform draw from {-1, +1}.
    double next_sign();

    /// Derive an independent child stream. Does not advance this stream.
    PrngStream substream(std::uint64_t child_id) const;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Stable 64-bit seed derivation for named sub-experiments: a full-avalanche
/// mix of (seed, a, b).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace proboost
