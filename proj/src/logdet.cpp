#include "edgelogdet/logdet.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "edgelogdet/errors.hpp"

namespace edgelogdet {

EdgeParams EdgeParams::from_sigma(std::size_t n, double sigma) {
    if (n < 1) {
        throw InvalidParameter("edge params: n must be >= 1");
    }
    if (!std::isfinite(sigma)) {
        throw InvalidParameter("edge params: sigma must be finite");
    }
    EdgeParams p;
    p.n = n;
    p.sigma = sigma;
    p.w = 0.5 * sigma;
    p.theta = 1.0 + std::pow(static_cast<double>(n), -2.0 / 3.0) * p.w;
    return p;
}

EdgeParams EdgeParams::from_two_theta(std::size_t n, double two_theta) {
    if (n < 1) {
        throw InvalidParameter("edge params: n must be >= 1");
    }
    const double sigma = (two_theta - 2.0) * std::pow(static_cast<double>(n), 2.0 / 3.0);
    return from_sigma(n, sigma);
}

double EdgeParams::n_theta_sq() const noexcept {
    return static_cast<double>(n) * theta * theta;
}

double EdgeParams::unscaled_shift() const noexcept {
    return 2.0 * theta * std::sqrt(static_cast<double>(n));
}

bool EdgeParams::real_root_regime() const noexcept {
    return theta > 0.0 && static_cast<double>(n - 1) <= n_theta_sq();
}

double BinaryScaled::log_abs() const noexcept {
    if (mantissa == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::numbers::ln2;
}

namespace {

void require_finite(const TridiagonalMatrix& m) {
    if (m.diag.empty() || m.offdiag.size() + 1 != m.diag.size()) {
        throw InvalidInput("tridiagonal matrix has inconsistent shape");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(m.diag.begin(), m.diag.end(), finite) ||
        !std::all_of(m.offdiag.begin(), m.offdiag.end(), finite)) {
        throw InvalidInput("tridiagonal matrix has non-finite entries");
    }
}

std::vector<double> squared_offdiag(const TridiagonalMatrix& m) {
    std::vector<double> b2(m.offdiag.size());
    std::transform(m.offdiag.begin(), m.offdiag.end(), b2.begin(), [](double b) { return b * b; });
    return b2;
}

// Smallest pivot magnitude allowed in the LDL^T count (LAPACK dstebz rule).
double pivot_floor(std::span<const double> b2) {
    double largest = 1.0;
    for (double v : b2) {
        largest = std::max(largest, v);
    }
    return DBL_MIN * largest;
}

// counts[j] = number of eigenvalues < shifts[j]. A pivot with |q| < pivmin is
// replaced by -pivmin, so an eigenvalue equal to the shift counts as below it.
void sturm_counts(std::span<const double> diag, std::span<const double> b2, double pivmin,
                  std::span<const double> shifts, std::span<std::int64_t> counts) {
    const std::size_t k = shifts.size();
    std::vector<double> q(k);
    for (std::size_t j = 0; j < k; ++j) {
        double v = diag[0] - shifts[j];
        v = std::fabs(v) < pivmin ? -pivmin : v;
        q[j] = v;
        counts[j] = v < 0.0;
    }
    for (std::size_t i = 1; i < diag.size(); ++i) {
        const double a = diag[i];
        const double bb = b2[i - 1];
        for (std::size_t j = 0; j < k; ++j) {
            double v = (a - shifts[j]) - bb / q[j];
            v = std::fabs(v) < pivmin ? -pivmin : v;
            q[j] = v;
            counts[j] += v < 0.0;
        }
    }
}

}  // namespace

BinaryScaled determinant_scaled(const TridiagonalMatrix& m, double shift, int d0_exponent) {
    require_finite(m);
    double prev = 0.0;
    double cur = 1.0;
    std::int64_t exponent = d0_exponent;
    for (std::size_t i = 0; i < m.diag.size(); ++i) {
        double next = (m.diag[i] - shift) * cur;
        if (i > 0) {
            next -= m.offdiag[i - 1] * m.offdiag[i - 1] * prev;
        }
        prev = cur;
        cur = next;
        const double big = std::max(std::fabs(cur), std::fabs(prev));
        if (big == 0.0) {
            return {};
        }
        int e = 0;
        std::frexp(big, &e);
        cur = std::ldexp(cur, 1 - e);
        prev = std::ldexp(prev, 1 - e);
        exponent += e - 1;
    }
    if (cur == 0.0) {
        return {};
    }
    int e = 0;
    std::frexp(cur, &e);
    return {std::ldexp(cur, 1 - e), exponent + e - 1};
}

SignedLogDet logabsdet_recurrence(const TridiagonalMatrix& m, const EdgeParams& p) {
    require_finite(m);
    if (m.size() != p.n) {
        throw InvalidInput("logabsdet_recurrence: matrix size " + std::to_string(m.size()) +
                           " does not match edge params n=" + std::to_string(p.n));
    }
    const BinaryScaled det = determinant_scaled(m, p.unscaled_shift());
    if (det.sign() == 0) {
        return SignedLogDet::singular();
    }
    const double n = static_cast<double>(p.n);
    return {det.sign(), det.log_abs() - 0.5 * n * std::log(n)};
}

std::size_t sturm_count(const TridiagonalMatrix& m, double s) {
    require_finite(m);
    const std::vector<double> b2 = squared_offdiag(m);
    const double shift[1] = {s};
    std::int64_t count[1] = {0};
    sturm_counts(m.diag, b2, pivot_floor(b2), shift, count);
    return static_cast<std::size_t>(count[0]);
}

std::vector<double> eigenvalues_bisection(const TridiagonalMatrix& m) {
    require_finite(m);
    const std::size_t n = m.size();
    const std::vector<double> b2 = squared_offdiag(m);
    const double pivmin = pivot_floor(b2);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = (i > 0 ? m.offdiag[i - 1] : 0.0) + (i + 1 < n ? m.offdiag[i] : 0.0);
        lo = std::min(lo, m.diag[i] - radius);
        hi = std::max(hi, m.diag[i] + radius);
    }
    const double bound = std::max(std::fabs(lo), std::fabs(hi));
    if (bound == 0.0) {
        return std::vector<double>(n, 0.0);
    }
    const double tol = 1e-13 * bound;
    const double pad = 2.0 * static_cast<double>(n) * DBL_EPSILON * bound + 2.0 * pivmin + tol;
    lo -= pad;
    hi += pad;

    // Make sure the outer bracket really holds every eigenvalue.
    std::int64_t edge_counts[2] = {0, 0};
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double shifts[2] = {lo, hi};
        sturm_counts(m.diag, b2, pivmin, shifts, edge_counts);
        if (edge_counts[0] == 0 && edge_counts[1] == static_cast<std::int64_t>(n)) {
            break;
        }
        const double width = hi - lo;
        if (edge_counts[0] != 0) lo -= width;
        if (edge_counts[1] != static_cast<std::int64_t>(n)) hi += width;
    }

    struct Bracket {
        double lo, hi;
        std::int64_t below_lo, below_hi;
    };
    std::vector<double> eigs(n);
    std::vector<Bracket> active{{lo, hi, 0, static_cast<std::int64_t>(n)}};
    std::vector<Bracket> next;
    std::vector<double> mids;
    std::vector<std::int64_t> counts;

    // All brackets are bisected together: one pass over the matrix counts every
    // midpoint, so the pivot divisions of different brackets are independent.
    while (!active.empty()) {
        next.clear();
        mids.clear();
        std::vector<Bracket> splitting;
        for (const Bracket& b : active) {
            if (b.below_hi <= b.below_lo) {
                continue;
            }
            const double mid = 0.5 * (b.lo + b.hi);
            if (b.hi - b.lo <= tol || mid <= b.lo || mid >= b.hi) {
                for (std::int64_t k = b.below_lo; k < b.below_hi; ++k) {
                    eigs[static_cast<std::size_t>(k)] = mid;
                }
                continue;
            }
            splitting.push_back(b);
            mids.push_back(mid);
        }
        counts.assign(mids.size(), 0);
        sturm_counts(m.diag, b2, pivmin, mids, counts);
        for (std::size_t j = 0; j < splitting.size(); ++j) {
            const Bracket& b = splitting[j];
            const std::int64_t c = std::clamp(counts[j], b.below_lo, b.below_hi);
            if (c > b.below_lo) next.push_back({b.lo, mids[j], b.below_lo, c});
            if (b.below_hi > c) next.push_back({mids[j], b.hi, c, b.below_hi});
        }
        active.swap(next);
    }
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

SignedLogDet logabsdet_from_eigs(std::span<const double> eigs, const EdgeParams& p) {
    if (eigs.size() != p.n) {
        throw InvalidInput("logabsdet_from_eigs: expected " + std::to_string(p.n) +
                           " eigenvalues, got " + std::to_string(eigs.size()));
    }
    const double root_n = std::sqrt(static_cast<double>(p.n));
    const double shift = p.unscaled_shift();
    int sign = 1;
    double sum = 0.0;
    double compensation = 0.0;
    for (double eig : eigs) {
        const double gap = eig / root_n - 2.0 * p.theta;
        if (eig == shift || gap == 0.0) {
            return SignedLogDet::singular();
        }
        if (gap < 0.0) {
            sign = -sign;
        }
        // Neumaier summation
        const double term = std::log(std::fabs(gap));
        const double t = sum + term;
        compensation += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return {sign, sum + compensation};
}

}  // namespace edgelogdet
