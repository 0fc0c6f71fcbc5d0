#include "edgelogdet/ensemble.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "edgelogdet/errors.hpp"
#include "edgelogdet/format.hpp"

namespace edgelogdet {

void EnsembleSpec::validate() const {
    if (n < 1) {
        throw InvalidParameter("ensemble: n must be >= 1");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidParameter("ensemble: alpha must be positive, got " + std::to_string(alpha));
    }
    if (!(spike >= 0.0) || !std::isfinite(spike)) {
        throw InvalidParameter("ensemble: spike must be nonnegative, got " + std::to_string(spike));
    }
}

void TridiagonalMatrix::validate() const {
    if (diag.empty()) {
        throw InvalidInput("tridiagonal matrix is empty");
    }
    if (offdiag.size() + 1 != diag.size()) {
        throw InvalidInput("tridiagonal matrix: offdiag must have length n - 1");
    }
    for (double a : diag) {
        if (!std::isfinite(a)) {
            throw InvalidInput("tridiagonal matrix: non-finite diagonal entry");
        }
    }
    for (double b : offdiag) {
        if (!std::isfinite(b) || b < 0.0) {
            throw InvalidInput("tridiagonal matrix: off-diagonal entries must be finite and >= 0");
        }
    }
}

TridiagonalMatrix sample_tridiagonal(const EnsembleSpec& spec, RngStream& rng) {
    spec.validate();
    TridiagonalMatrix m;
    m.diag.resize(spec.n);
    m.offdiag.resize(spec.n - 1);

    const double sd = std::sqrt(spec.alpha);
    for (double& a : m.diag) {
        a = sd * rng.normal();
    }
    for (std::size_t i = 1; i < spec.n; ++i) {
        const double b2 = sample_gamma(static_cast<double>(i) / spec.alpha, spec.alpha, rng);
        m.offdiag[i - 1] = std::sqrt(b2);
    }
    return m;
}

TridiagonalMatrix apply_spike(TridiagonalMatrix m, double h) {
    if (h != 0.0 && !m.diag.empty()) {
        m.diag.back() += h * std::sqrt(static_cast<double>(m.diag.size()));
    }
    return m;
}

TridiagonalMatrix sample_ensemble(const EnsembleSpec& spec, RngStream& rng) {
    return apply_spike(sample_tridiagonal(spec, rng), spec.spike);
}

void write_matrix_csv(std::ostream& out, const TridiagonalMatrix& m) {
    out << "index,diag,offdiag\n";
    for (std::size_t i = 0; i < m.diag.size(); ++i) {
        out << (i + 1) << ',' << format_double(m.diag[i]) << ',';
        if (i < m.offdiag.size()) {
            out << format_double(m.offdiag[i]);
        }
        out << '\n';
    }
}

}  // namespace edgelogdet
