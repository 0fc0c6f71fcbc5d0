#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "edgelogdet/rng.hpp"

namespace edgelogdet {

/// What to sample: an n x n tridiagonal Gaussian ensemble with entry variance
/// parameter alpha (1 = GUE, 2 = GOE, any alpha > 0 a beta-ensemble) and an
/// optional rank-one spike of strength `spike`.
struct EnsembleSpec {
    std::size_t n = 1;
    double alpha = 1.0;
    double spike = 0.0;

    // Throws InvalidParameter unless n >= 1, alpha > 0 and spike >= 0.
    void validate() const;
};

/// Symmetric tridiagonal matrix in unscaled form: diag a_1..a_n and
/// nonnegative off-diagonal b_1..b_{n-1}. Indexing is zero-based in storage:
/// diag[i - 1] = a_i, offdiag[i - 1] = b_i.
struct TridiagonalMatrix {
    std::vector<double> diag;
    std::vector<double> offdiag;

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

    // Throws InvalidInput on shape mismatch, empty matrix, negative or
    // non-finite entries.
    void validate() const;
};

/// Trotter form: a_i ~ N(0, alpha), b_i^2 ~ Gamma(i / alpha, scale alpha),
/// i.e. chi^2(2i/alpha) / (2/alpha). Draw order: a_1..a_n, then b_1..b_{n-1}.
/// The spike in `spec` is ignored here; see apply_spike / sample_ensemble.
TridiagonalMatrix sample_tridiagonal(const EnsembleSpec& spec, RngStream& rng);

/// Adds h * sqrt(n) to the bottom-right entry.
TridiagonalMatrix apply_spike(TridiagonalMatrix m, double h);

/// sample_tridiagonal followed by apply_spike(spec.spike).
TridiagonalMatrix sample_ensemble(const EnsembleSpec& spec, RngStream& rng);

/// CSV with header `index,diag,offdiag`; one row per diagonal entry, 1-based
/// index, off-diagonal left blank on the last row.
void write_matrix_csv(std::ostream& out, const TridiagonalMatrix& m);

}  // namespace edgelogdet
