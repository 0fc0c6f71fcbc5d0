#include "edgelogdet/edge_process.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "edgelogdet/errors.hpp"
#include "edgelogdet/format.hpp"

namespace edgelogdet {

namespace {

constexpr double kNearSingular = 1e-12;

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double term) noexcept {
        const double t = sum_ + term;
        correction_ += std::fabs(sum_) >= std::fabs(term) ? (sum_ - t) + term : (term - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

void require_real_roots(const EdgeParams& p, const char* what) {
    if (!p.real_root_regime()) {
        throw RegimeError(std::string(what) + ": needs (N - 1) <= N theta^2 (theta=" +
                          std::to_string(p.theta) + ", N=" + std::to_string(p.n) + ")");
    }
}

}  // namespace

EdgeQuantities edge_quantities(std::size_t i, const EdgeParams& p) {
    if (i < 1 || i > p.n) {
        throw InvalidParameter("edge_quantities: index " + std::to_string(i) + " outside 1..N");
    }
    const double scale = p.n_theta_sq();
    const double k = static_cast<double>(i - 1);
    if (!(p.theta > 0.0) || k > scale) {
        throw RegimeError("edge_quantities: complex characteristic roots at i=" + std::to_string(i));
    }
    const double s = std::sqrt(1.0 - k / scale);
    EdgeQuantities q;
    q.i = i;
    q.r = 1.0 + s;
    q.m = (k / scale) / q.r;  // r m = (i-1)/(N theta^2)
    q.gamma = q.m / q.r;
    if (i > 1) {
        const double s_prev = std::sqrt(1.0 - (k - 1.0) / scale);
        const double r_prev = 1.0 + s_prev;
        // r_{i-1} - r_i = (1 / (N theta^2)) / (s_{i-1} + s_i)
        q.delta = q.m / (q.r * r_prev) * (1.0 / scale) / (s_prev + s);
    }
    return q;
}

double rho_plus_log_modulus(std::size_t j, const EdgeParams& p) {
    if (j < 1) {
        throw InvalidParameter("rho_plus_log_modulus: j must be >= 1");
    }
    const double k = static_cast<double>(j - 1);
    const double disc = p.n_theta_sq() - k;
    if (disc >= 0.0) {
        return std::log(std::fabs(p.theta * std::sqrt(static_cast<double>(p.n)) + std::sqrt(disc)));
    }
    return 0.5 * std::log(k);
}

XiInputs xi_inputs(const TridiagonalMatrix& m, const EdgeParams& p, std::size_t i) {
    if (i < 2 || i > m.size() || m.size() != p.n) {
        throw InvalidParameter("xi_inputs: index " + std::to_string(i) + " outside 2..N");
    }
    const EdgeQuantities q = edge_quantities(i, p);
    const double r_prev = edge_quantities(i - 1, p).r;
    const double root = std::sqrt(static_cast<double>(p.n)) * p.theta;
    const double k = static_cast<double>(i - 1);
    const double b = m.offdiag[i - 2];

    XiInputs x;
    x.c_prev = (b * b - k) / std::sqrt(k);
    x.alpha_i = m.diag[i - 1] / (root * q.r);
    x.beta_i = std::sqrt(q.m / q.r) * x.c_prev / (root * r_prev);
    x.xi_i = x.alpha_i + x.beta_i;
    return x;
}

bool EdgeTrace::flagged() const noexcept {
    for (TraceFlag f : flags) {
        if (f != TraceFlag::none) return true;
    }
    return false;
}

EdgeTrace compute_trace(const TridiagonalMatrix& m, const EdgeParams& p, TraceOptions options) {
    m.validate();
    const std::size_t n = m.size();
    if (n != p.n) {
        throw InvalidInput("compute_trace: matrix size does not match edge params");
    }
    if (!(p.theta > 0.0)) {
        throw InvalidParameter("compute_trace: theta must be positive");
    }
    if (options.with_r || options.with_l) {
        require_real_roots(p, "compute_trace (R/L series)");
    }

    EdgeTrace trace;
    trace.params = p;
    trace.e_sign.assign(n + 1, 0);
    trace.e_log.assign(n + 1, -std::numeric_limits<double>::infinity());
    trace.flags.assign(n + 1, TraceFlag::none);
    trace.e_sign[0] = 1;
    trace.e_log[0] = 0.0;

    // Renormalized determinant pair, as in determinant_scaled.
    const double shift = p.unscaled_shift();
    double prev = 0.0;
    double cur = 1.0;
    std::int64_t exponent = 0;
    CompensatedSum rho_sum;
    bool vanished = false;
    for (std::size_t i = 1; i <= n; ++i) {
        rho_sum.add(rho_plus_log_modulus(i, p));
        if (vanished) {
            continue;
        }
        double next = (m.diag[i - 1] - shift) * cur;
        if (i > 1) {
            next -= m.offdiag[i - 2] * m.offdiag[i - 2] * prev;
        }
        prev = cur;
        cur = next;
        const double big = std::max(std::fabs(cur), std::fabs(prev));
        if (big == 0.0) {
            vanished = true;
            continue;
        }
        int e = 0;
        std::frexp(big, &e);
        cur = std::ldexp(cur, 1 - e);
        prev = std::ldexp(prev, 1 - e);
        exponent += e - 1;
        if (cur != 0.0) {
            trace.e_sign[i] = cur > 0.0 ? 1 : -1;
            trace.e_log[i] = std::log(std::fabs(cur)) + static_cast<double>(exponent) * std::numbers::ln2 -
                             rho_sum.value();
        }
    }

    if (n < 2) {
        return trace;
    }

    const double root = std::sqrt(static_cast<double>(n)) * p.theta;
    const auto ratio_from_determinant = [&](std::size_t i) {
        if (trace.e_sign[i - 1] == 0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return trace.e_sign[i] * trace.e_sign[i - 1] * std::exp(trace.e_log[i] - trace.e_log[i - 1]) + 1.0;
    };

    if (options.with_r) {
        std::vector<double> r_values(n - 1);
        const double d1 = m.diag[0] - 2.0 * root;
        const double r2 = edge_quantities(2, p).r;
        bool fallback = false;
        if (std::fabs(d1) < kNearSingular) {
            trace.flags[2] = TraceFlag::near_singular;
            fallback = true;
            r_values[0] = ratio_from_determinant(2);
        } else {
            const double b1 = m.offdiag[0];
            r_values[0] = (d1 * (m.diag[1] - 2.0 * root) - b1 * b1) / (r2 * root * d1) + 1.0;
        }
        for (std::size_t i = 3; i <= n; ++i) {
            const double r_prev = r_values[i - 3];
            double& r_i = r_values[i - 2];
            if (fallback) {
                trace.flags[i] = TraceFlag::from_determinant;
                r_i = ratio_from_determinant(i);
                continue;
            }
            const double denom = 1.0 - r_prev;
            if (!(std::fabs(denom) >= kNearSingular)) {
                trace.flags[i] = TraceFlag::near_singular;
                fallback = true;
                r_i = ratio_from_determinant(i);
                continue;
            }
            const EdgeQuantities q = edge_quantities(i, p);
            const XiInputs x = xi_inputs(m, p, i);
            r_i = x.alpha_i - q.gamma + (q.gamma + x.beta_i - q.delta) / denom;
        }
        trace.r_series = IndexedSeries(2, std::move(r_values));
    }

    if (options.with_l) {
        std::vector<double> l_values(n - 1, 0.0);
        for (std::size_t i = 3; i <= n; ++i) {
            const double gamma = edge_quantities(i, p).gamma;
            l_values[i - 2] = xi_inputs(m, p, i).xi_i + gamma * l_values[i - 3];
        }
        trace.l_series = IndexedSeries(2, std::move(l_values));
    }
    return trace;
}

double exp_consistency_gap(const EdgeTrace& trace) {
    const std::size_t n = trace.params.n;
    if (n < 2 || trace.r_series.empty()) {
        throw InvalidParameter("exp_consistency_gap: needs N >= 2 and an R series");
    }
    CompensatedSum via_ratios;
    via_ratios.add(trace.e_log[2]);
    for (std::size_t i = 3; i <= n; ++i) {
        via_ratios.add(std::log(std::fabs(1.0 - trace.r_series[i])));
    }
    return trace.e_log[n] - via_ratios.value();
}

IndexedSeries g_weights(const EdgeParams& p) {
    require_real_roots(p, "g_weights");
    const std::size_t n = p.n;
    if (n < 2) {
        return IndexedSeries(3, {});
    }
    IndexedSeries g(3, std::vector<double>(n - 1, 1.0));
    for (std::size_t i = n; i >= 3; --i) {
        g[i] = 1.0 + edge_quantities(i, p).gamma * g[i + 1];
    }
    return g;
}

double xi_variance_exact(std::size_t i, const EdgeParams& p, double alpha) {
    if (i < 3) {
        throw InvalidParameter("xi_variance_exact: i must be >= 3");
    }
    if (!(alpha > 0.0)) {
        throw InvalidParameter("xi_variance_exact: alpha must be positive");
    }
    require_real_roots(p, "xi_variance_exact");
    const EdgeQuantities q = edge_quantities(i, p);
    const double r_prev = edge_quantities(i - 1, p).r;
    const double scale = p.n_theta_sq();
    return alpha / (scale * q.r * q.r) + alpha * q.m * q.r / (scale * q.r * q.r * r_prev * r_prev);
}

SumVariance predicted_sum_variance(const EdgeParams& p, double alpha) {
    if (!(p.theta > 1.0)) {
        throw DomainError("predicted_sum_variance: theta must exceed 1");
    }
    const IndexedSeries g = g_weights(p);
    CompensatedSum total;
    for (std::size_t i = 3; i <= p.n; ++i) {
        total.add(g[i + 1] * g[i + 1] * xi_variance_exact(i, p, alpha));
    }
    const double root = std::sqrt(p.theta * p.theta - 1.0);
    return {total.value(), alpha * std::log((p.theta + root) / (2.0 * root))};
}

IndexedSeries l_variance_profile(const EdgeParams& p, double alpha) {
    require_real_roots(p, "l_variance_profile");
    if (p.n < 2) {
        return IndexedSeries(2, {});
    }
    IndexedSeries v(2, std::vector<double>(p.n - 1, 0.0));
    for (std::size_t i = 3; i <= p.n; ++i) {
        const double gamma = edge_quantities(i, p).gamma;
        v[i] = xi_variance_exact(i, p, alpha) + gamma * gamma * v[i - 1];
    }
    return v;
}

double t_delta_sum(const EdgeParams& p) {
    const IndexedSeries g = g_weights(p);
    CompensatedSum total;
    for (std::size_t j = p.n; j >= 3; --j) {
        total.add(edge_quantities(j, p).delta * g[j + 1]);
    }
    return total.value();
}

IndexedSeries t_delta_series(const EdgeParams& p) {
    require_real_roots(p, "t_delta_series");
    if (p.n < 3) {
        return IndexedSeries(3, {});
    }
    IndexedSeries t(3, std::vector<double>(p.n - 2, 0.0));
    double running = 0.0;
    for (std::size_t i = 3; i <= p.n; ++i) {
        const EdgeQuantities q = edge_quantities(i, p);
        running = q.delta + q.gamma * running;
        t[i] = running;
    }
    return t;
}

void write_trace_csv(std::ostream& out, const EdgeTrace& trace) {
    out << "i,e_sign,e_log,R,L,flag\n";
    for (std::size_t i = 1; i <= trace.params.n; ++i) {
        out << i << ',' << trace.e_sign[i] << ',' << format_double(trace.e_log[i]) << ',';
        if (trace.r_series.contains(i)) {
            out << format_double(trace.r_series[i]);
        }
        out << ',';
        if (trace.l_series && trace.l_series->contains(i)) {
            out << format_double((*trace.l_series)[i]);
        }
        out << ',' << static_cast<int>(trace.flags[i]) << '\n';
    }
}

namespace {

double saturated_value(int sign, double log_abs) {
    if (sign == 0) {
        return 0.0;
    }
    const double cap_log = std::log(kScatterCap);
    const double magnitude = log_abs >= cap_log ? kScatterCap : std::exp(log_abs);
    return sign * magnitude;
}

}  // namespace

void write_scatter_csv(std::ostream& out, const EdgeTrace& trace) {
    out << "i,E_i,E_im1\n";
    for (std::size_t i = 2; i <= trace.params.n; ++i) {
        out << i << ',' << format_double(saturated_value(trace.e_sign[i], trace.e_log[i])) << ','
            << format_double(saturated_value(trace.e_sign[i - 1], trace.e_log[i - 1])) << '\n';
    }
}

}  // namespace edgelogdet
