#include "edgelogdet/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "edgelogdet/errors.hpp"

namespace edgelogdet {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline Philox4x32::Counter philox_round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter counter, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        counter = philox_round(counter, key);
    }
    return counter;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
    : seed_(master_seed), stream_(stream_index) {}

std::uint64_t RngStream::next_u64() noexcept {
    if (buffered_words_ == 0) {
        const Philox4x32::Counter counter{
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                                  static_cast<std::uint32_t>(seed_ >> 32)};
        buffer_ = Philox4x32::block(counter, key);
        ++block_;
        buffered_words_ = 2;
    }
    const int word = 2 - buffered_words_;
    --buffered_words_;
    return static_cast<std::uint64_t>(buffer_[2 * word]) |
           (static_cast<std::uint64_t>(buffer_[2 * word + 1]) << 32);
}

double RngStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double RngStream::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kTwoPow53Inv;
}

double RngStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t campaign_stream_index(std::uint64_t n, std::uint64_t rep) {
    if (n > 0xffffffffu || rep > 0xffffffffu) {
        throw InvalidParameter("campaign_stream_index: n and rep must fit in 32 bits");
    }
    return (n << 32) | rep;
}

double sample_gamma(double shape, double scale, RngStream& rng) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
        throw InvalidParameter("sample_gamma: shape and scale must be positive and finite (shape=" +
                               std::to_string(shape) + ", scale=" + std::to_string(scale) + ")");
    }
    if (shape < 1.0) {
        const double boosted = sample_gamma(shape + 1.0, 1.0, rng);
        return scale * boosted * std::pow(rng.uniform_open(), 1.0 / shape);
    }

    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return scale * d * v;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return scale * d * v;
        }
    }
}

}  // namespace edgelogdet
