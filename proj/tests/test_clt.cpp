#include <cmath>
#include <numbers>

#include "doctest.h"
#include "edgelogdet/clt.hpp"
#include "edgelogdet/errors.hpp"

using namespace edgelogdet;

TEST_CASE("theta from sigma") {
    CHECK(theta_from_sigma(1000, 0.0).theta == 1.0);
    CHECK(theta_from_sigma(1000, 4.0).theta == doctest::Approx(1.02).epsilon(1e-14));
    CHECK(theta_from_sigma(1000, -2.0).theta == doctest::Approx(0.99).epsilon(1e-14));
    CHECK(theta_from_sigma(1000, 4.0).w == 2.0);
}

TEST_CASE("spike classification") {
    CHECK(classify_spike(0.0) == SpikeMode::none);
    CHECK(classify_spike(0.5) == SpikeMode::subcritical);
    CHECK(classify_spike(1.0) == SpikeMode::critical);
    CHECK(classify_spike(1.5) == SpikeMode::supercritical);
    CHECK_THROWS_AS(classify_spike(-0.1), InvalidParameter);
}

TEST_CASE("center and scale: log N scaling, no spike") {
    const CenterScale cs = center_scale(theta_from_sigma(1000, 0.0), 1.0, {});
    CHECK(cs.center == doctest::Approx(500.0).epsilon(1e-15));
    CHECK(cs.scale == doctest::Approx(std::sqrt(std::log(1000.0) / 3.0)).epsilon(1e-15));
    CHECK_FALSE(cs.unproven_regime);
}

TEST_CASE("center and scale: theta scaling") {
    const CenterScale cs = center_scale(theta_from_sigma(1000, 4.0), 1.0, {Scaling::theta, SpikeMode::none});
    const double root = std::sqrt(0.0404);
    CHECK(cs.scale == doctest::Approx(std::sqrt(std::log((1.02 + root) / (2.0 * root)))).epsilon(1e-12));
    CHECK(cs.scale == doctest::Approx(1.0541).epsilon(1e-4));
    // sigma N^{1/3} - (2/3) sigma^{3/2} = 40 - 16/3
    CHECK(cs.center == doctest::Approx(500.0 + 40.0 - 16.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(center_scale(theta_from_sigma(1000, 0.0), 1.0, {Scaling::theta, SpikeMode::none}), DomainError);
    CHECK_THROWS_AS(center_scale(theta_from_sigma(1000, -1.0), 1.0, {Scaling::theta, SpikeMode::none}), DomainError);
}

TEST_CASE("center and scale: GOE with critical spike") {
    const CenterScale cs =
        center_scale(theta_from_sigma(1000, 0.0), 2.0, {Scaling::log_n, SpikeMode::critical}, 1.0);
    CHECK(cs.center == doctest::Approx(500.0 - 0.5 * std::log(1000.0)).epsilon(1e-14));
    CHECK(cs.scale == doctest::Approx(std::sqrt(2.0 / 3.0 * std::log(1000.0))));
}

TEST_CASE("center and scale: spike modes") {
    const EdgeParams p = theta_from_sigma(1000, 2.0);
    const CenterScale plain = center_scale(p, 1.0, {});
    const CenterScale sub = center_scale(p, 1.0, {Scaling::log_n, SpikeMode::subcritical}, 0.5);
    CHECK(sub.center == plain.center);
    const CenterScale super = center_scale(p, 1.0, {Scaling::log_n, SpikeMode::supercritical}, 3.0);
    CHECK(super.center == doctest::Approx(plain.center + std::log(2.0)));
    CHECK(super.unproven_regime);
    CHECK_THROWS_AS(center_scale(p, 1.0, {Scaling::log_n, SpikeMode::critical}, 0.9), InvalidParameter);
    CHECK_THROWS_AS(center_scale(p, 1.0, {Scaling::log_n, SpikeMode::none}, 0.5), InvalidParameter);
    CHECK_THROWS_AS(center_scale(p, 0.0, {}), InvalidParameter);
}

TEST_CASE("negative sigma uses |sigma|^{3/2}") {
    const CenterScale cs = center_scale(theta_from_sigma(1000, -4.0), 1.0, {});
    CHECK(cs.center == doctest::Approx(500.0 - 40.0 - 16.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("center is increasing in sigma below N^{2/3}") {
    const std::size_t n = 8192;
    const double h = 1e-3;
    const double limit = std::pow(static_cast<double>(n), 2.0 / 3.0);
    double previous = -INFINITY;
    for (double sigma = 0.0; sigma < limit - 1.0; sigma += 1.0) {
        const double c = center_scale(theta_from_sigma(n, sigma), 1.0, {}).center;
        const double c_up = center_scale(theta_from_sigma(n, sigma + h), 1.0, {}).center;
        REQUIRE(c_up > c);
        REQUIRE(c > previous);
        previous = c;
    }
}

TEST_CASE("theta and log N scales approach each other") {
    double last = INFINITY;
    for (double n : {1e4, 1e6, 1e8}) {
        const double ll = std::log(std::log(n));
        const EdgeParams p = theta_from_sigma(static_cast<std::size_t>(n), ll * ll);
        const double a = center_scale(p, 1.0, {Scaling::theta, SpikeMode::none}).scale;
        const double b = center_scale(p, 1.0, {Scaling::log_n, SpikeMode::none}).scale;
        const double gap = std::fabs(a / b - 1.0);
        CHECK(gap < last);
        last = gap;
    }
}

TEST_CASE("standardize") {
    const EdgeParams p = theta_from_sigma(1000, 0.0);
    const CenterScale cs = center_scale(p, 1.0, {});
    const Standardized at_center = standardize({1, cs.center}, p, 1.0, {});
    CHECK(at_center.z == 0.0);
    CHECK(at_center.raw == cs.center);
    const Standardized one_up = standardize({-1, cs.center + cs.scale}, p, 1.0, {});
    CHECK(one_up.z == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(standardize(SignedLogDet::singular(), p, 1.0, {}), SingularDeterminant);
}

TEST_CASE("deterministic shift: exact sum") {
    CHECK(deterministic_shift_exact(theta_from_sigma(1, 0.0)) == doctest::Approx(std::numbers::ln2));
    CHECK(deterministic_shift_exact(theta_from_sigma(2, 0.0)) ==
          doctest::Approx(std::numbers::ln2 + std::log(1.0 + std::sqrt(0.5))).epsilon(1e-15));
    CHECK(deterministic_shift_exact(theta_from_sigma(2, 0.0)) == doctest::Approx(1.2279471773).epsilon(1e-10));
    CHECK_THROWS_AS(deterministic_shift_exact(EdgeParams::from_two_theta(100, 1.5)), DomainError);
}

TEST_CASE("deterministic shift: asymptotic form") {
    const EdgeParams p = theta_from_sigma(1000000, 7.0);
    const double n = 1e6;
    const double sigma_form = n / 2.0 + p.sigma * std::cbrt(n) - (2.0 / 3.0) * std::pow(p.sigma, 1.5);
    CHECK(deterministic_shift_asymptotic(p) - 0.5 * std::numbers::ln2 == doctest::Approx(sigma_form).epsilon(1e-15));
    CHECK_THROWS_AS(deterministic_shift_asymptotic(theta_from_sigma(100, 0.0)), DomainError);
    CHECK_THROWS_AS(deterministic_shift_asymptotic(theta_from_sigma(100, -1.0)), DomainError);
}

TEST_CASE("deterministic shift: exact minus asymptotic") {
    const auto gap = [](double n, double w) {
        const EdgeParams p = theta_from_sigma(static_cast<std::size_t>(n), 2.0 * w);
        return deterministic_shift_exact(p) - deterministic_shift_asymptotic(p);
    };
    CHECK(std::fabs(gap(1e6, 5.0)) <= 5.0 * std::pow(5.0, -1.5));
    // The leftover is w^2 N^{-1/3} to leading order; it vanishes as N grows at fixed w.
    for (double w : {5.0, 10.0, 20.0, 40.0}) {
        CAPTURE(w);
        CHECK(gap(1e6, w) / (w * w / 100.0) == doctest::Approx(1.0).epsilon(0.1));
        CHECK(std::fabs(gap(1e8, w)) < std::fabs(gap(1e6, w)));
    }
}
