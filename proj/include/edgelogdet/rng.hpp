#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace edgelogdet {

/// Philox4x32-10 block function (Salmon et al., Random123).
///
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. It is a
/// bijection of the counter for every key, so distinct counters never collide.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key) noexcept;
};

struct StreamProvenance {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    friend bool operator==(const StreamProvenance&, const StreamProvenance&) = default;
};

/*
 * Deterministic random stream.
 *
 * Stream (seed, index) draws the Philox4x32-10 blocks
 *
 *     key     = (seed & 0xffffffff, seed >> 32)
 *     counter = (block & 0xffffffff, block >> 32, index & 0xffffffff, index >> 32)
 *
 * for block = 0, 1, 2, ... and emits each block as two 64-bit words (low word
 * first). Streams with different provenance therefore read disjoint counter
 * ranges of the same keyed permutation, so their outputs never depend on the
 * order in which streams are created or consumed.
 *
 * Satisfies std::uniform_random_bit_generator.
 */
class RngStream {
public:
    using result_type = std::uint64_t;

    static constexpr std::string_view algorithm = "philox4x32-10";

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept;

    [[nodiscard]] StreamProvenance provenance() const noexcept { return {seed_, stream_}; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept;

    // 53-bit uniform on [0, 1).
    double uniform() noexcept;
    // 53-bit uniform on the open interval (0, 1).
    double uniform_open() noexcept;

    /// Standard normal variate, Box-Muller: with u1, u2 = uniform_open(),
    /// z0 = sqrt(-2 log u1) cos(2 pi u2) is returned and
    /// z1 = sqrt(-2 log u1) sin(2 pi u2) is kept for the next call.
    double normal() noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int buffered_words_ = 0;  // 64-bit words left in buffer_
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Stream index for replicate `rep` of matrix size `n`: (n << 32) | rep.
/// Both arguments must fit in 32 bits.
std::uint64_t campaign_stream_index(std::uint64_t n, std::uint64_t rep);

/// Gamma(shape, scale) by the Marsaglia-Tsang squeeze method. For shape < 1 a
/// Gamma(shape + 1) draw is multiplied by U^(1/shape).
/// Throws InvalidParameter unless shape > 0 and scale > 0.
double sample_gamma(double shape, double scale, RngStream& rng);

}  // namespace edgelogdet
