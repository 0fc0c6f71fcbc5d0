#pragma once

#include <cstddef>

namespace edgelogdet {

/// Location of the log-determinant singularity, 2 theta = 2 + n^(-2/3) sigma,
/// in the coordinates of M / sqrt(n). w = sigma / 2 so theta = 1 + n^(-2/3) w.
struct EdgeParams {
    std::size_t n = 1;
    double sigma = 0.0;
    double theta = 1.0;
    double w = 0.0;

    static EdgeParams from_sigma(std::size_t n, double sigma);
    static EdgeParams from_two_theta(std::size_t n, double two_theta);

    // N theta^2, the index scale at which the characteristic roots turn complex.
    [[nodiscard]] double n_theta_sq() const noexcept;
    // 2 theta sqrt(n): the shift in unscaled matrix units.
    [[nodiscard]] double unscaled_shift() const noexcept;
    // True when (n - 1) <= n theta^2, so that every r_i, m_i with i <= n is real.
    [[nodiscard]] bool real_root_regime() const noexcept;
};

}  // namespace edgelogdet
