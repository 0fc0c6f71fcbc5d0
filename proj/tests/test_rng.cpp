#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "edgelogdet/errors.hpp"
#include "edgelogdet/rng.hpp"

using namespace edgelogdet;

TEST_CASE("philox known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    RngStream c(42, 8);
    RngStream d(43, 7);
    bool differs_c = false;
    bool differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs_c |= x != c();
        differs_d |= x != d();
    }
    CHECK(differs_c);
    CHECK(differs_d);
    CHECK(a.provenance() == StreamProvenance{42, 7});
    CHECK(RngStream::algorithm == "philox4x32-10");
}

TEST_CASE("stream words follow the documented counter layout") {
    RngStream s(0x0123456789abcdefULL, 0xfedcba9876543210ULL);
    const Philox4x32::Key key{0x89abcdef, 0x01234567};
    for (std::uint32_t block = 0; block < 3; ++block) {
        const auto out = Philox4x32::block({block, 0, 0x76543210, 0xfedcba98}, key);
        CHECK(s.next_u64() == (std::uint64_t{out[1]} << 32 | out[0]));
        CHECK(s.next_u64() == (std::uint64_t{out[3]} << 32 | out[2]));
    }
}

TEST_CASE("uniforms stay in range") {
    RngStream s(1, 1);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        const double v = s.uniform_open();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("normal sampler moments") {
    RngStream s(5, 0);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    CHECK(std::fabs(sum / n) < 0.005);
    CHECK(std::fabs(sum2 / n - 1.0) < 0.01);
    CHECK(std::fabs(sum4 / n - 3.0) < 0.05);
}

TEST_CASE("campaign stream index packs size and replicate") {
    CHECK(campaign_stream_index(8192, 3) == ((std::uint64_t{8192} << 32) | 3));
    CHECK_THROWS_AS(campaign_stream_index(std::uint64_t{1} << 32, 0), InvalidParameter);
    CHECK_THROWS_AS(campaign_stream_index(1, std::uint64_t{1} << 32), InvalidParameter);
}

TEST_CASE("gamma mean, shape 1 scale 2") {
    RngStream s(11, 0);
    const int n = 1000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_gamma(1.0, 2.0, s);
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.005));
}

TEST_CASE("gamma shape 0.5 scale 2 matches the chi-square(1) cdf") {
    RngStream s(12, 0);
    const int n = 1000000;
    int below = 0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_gamma(0.5, 2.0, s);
        REQUIRE(x > 0.0);
        below += x <= 3.8415;
    }
    // P(chi2(1) <= x) = erf(sqrt(x / 2)); 3.8415 is the 95% point.
    CHECK(std::erf(std::sqrt(3.8415 / 2.0)) == doctest::Approx(0.95).epsilon(1e-4));
    CHECK(std::fabs(static_cast<double>(below) / n - 0.95) < 0.002);
}

TEST_CASE("gamma with small shape keeps mean and variance") {
    RngStream s(13, 0);
    const int n = 400000;
    const double shape = 0.2, scale = 3.0;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = sample_gamma(shape, scale, s);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(shape * scale).epsilon(0.02));
    CHECK(sum2 / n - mean * mean == doctest::Approx(shape * scale * scale).epsilon(0.05));
}

TEST_CASE("gamma draws are deterministic per provenance") {
    RngStream a(99, 4);
    RngStream b(99, 4);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample_gamma(0.7, 1.5, a) == sample_gamma(0.7, 1.5, b));
    }
}

TEST_CASE("gamma rejects bad parameters") {
    RngStream s(0, 0);
    CHECK_THROWS_AS(sample_gamma(0.0, 1.0, s), InvalidParameter);
    CHECK_THROWS_AS(sample_gamma(1.0, -1.0, s), InvalidParameter);
    CHECK_THROWS_AS(sample_gamma(std::nan(""), 1.0, s), InvalidParameter);
}
