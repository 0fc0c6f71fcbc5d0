#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "edgelogdet/edge_params.hpp"
#include "edgelogdet/ensemble.hpp"

namespace edgelogdet {

/// sign in {-1, 0, +1} and log|value| in nats; a zero value carries
/// log_abs = -infinity.
struct SignedLogDet {
    int sign = 0;
    double log_abs = -std::numeric_limits<double>::infinity();

    static SignedLogDet singular() noexcept { return {}; }
    [[nodiscard]] bool is_singular() const noexcept { return sign == 0; }
};

/// value = mantissa * 2^exponent with |mantissa| in [1, 2) unless zero.
struct BinaryScaled {
    double mantissa = 0.0;
    std::int64_t exponent = 0;

    [[nodiscard]] int sign() const noexcept { return (mantissa > 0) - (mantissa < 0); }
    [[nodiscard]] double log_abs() const noexcept;
};

/// det(M - shift * I) via the three-term recurrence
///     D_i = (a_i - shift) D_{i-1} - b_{i-1}^2 D_{i-2},  D_0 = 2^d0_exponent, D_{-1} = 0.
/// After every step the pair (D_i, D_{i-1}) is rescaled by a power of two so
/// that the larger magnitude lies in [1, 2); the exponent is carried exactly.
BinaryScaled determinant_scaled(const TridiagonalMatrix& m, double shift, int d0_exponent = 0);

/// Sign and log|det(M / sqrt(n) - 2 theta I)| = log|D_n| - (n/2) log n.
/// Throws InvalidInput on non-finite entries or a size mismatch with p.n.
SignedLogDet logabsdet_recurrence(const TridiagonalMatrix& m, const EdgeParams& p);

/// Number of eigenvalues of M strictly below s (negative LDL^T pivots).
std::size_t sturm_count(const TridiagonalMatrix& m, double s);

/// All eigenvalues of the unscaled M, ascending, by Sturm-count bisection.
std::vector<double> eigenvalues_bisection(const TridiagonalMatrix& m);

/// sign and log of prod_i (eig_i / sqrt(n) - 2 theta), eigs unscaled.
SignedLogDet logabsdet_from_eigs(std::span<const double> eigs, const EdgeParams& p);

}  // namespace edgelogdet
