#include "edgelogdet/clt.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "edgelogdet/errors.hpp"

namespace edgelogdet {

SpikeMode classify_spike(double h) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
        throw InvalidParameter("spike must be a finite nonnegative number");
    }
    if (h == 0.0) return SpikeMode::none;
    if (h < 1.0) return SpikeMode::subcritical;
    if (h == 1.0) return SpikeMode::critical;
    return SpikeMode::supercritical;
}

std::string_view to_string(Scaling s) noexcept {
    return s == Scaling::log_n ? "thm1" : "thm2";
}

std::string_view to_string(SpikeMode m) noexcept {
    switch (m) {
        case SpikeMode::none: return "none";
        case SpikeMode::subcritical: return "subcritical";
        case SpikeMode::critical: return "critical";
        case SpikeMode::supercritical: return "supercritical";
    }
    return "none";
}

EdgeParams theta_from_sigma(std::size_t n, double sigma) {
    return EdgeParams::from_sigma(n, sigma);
}

CenterScale center_scale(const EdgeParams& p, double alpha, CltVariant variant, std::optional<double> h) {
    if (!(alpha > 0.0)) {
        throw InvalidParameter("center_scale: alpha must be positive");
    }
    const double spike = h.value_or(0.0);
    const SpikeMode implied = classify_spike(spike);
    if (variant.spike_mode == SpikeMode::critical && spike != 1.0) {
        throw InvalidParameter("center_scale: critical spike mode requires h = 1");
    }
    if (variant.spike_mode != implied) {
        throw InvalidParameter("center_scale: spike mode '" + std::string(to_string(variant.spike_mode)) +
                               "' does not match h=" + std::to_string(spike));
    }

    const double n = static_cast<double>(p.n);
    const double log_n = std::log(n);
    CenterScale out;
    out.center = 0.5 * n - (alpha - 1.0) / 6.0 * log_n + p.sigma * std::cbrt(n) -
                 (2.0 / 3.0) * std::pow(std::fabs(p.sigma), 1.5);
    if (variant.spike_mode == SpikeMode::critical) {
        out.center -= log_n / 3.0;
    } else if (variant.spike_mode == SpikeMode::supercritical) {
        out.center += std::log(std::fabs(1.0 - spike));
        out.unproven_regime = true;
    }

    if (variant.scaling == Scaling::log_n) {
        out.scale = std::sqrt(alpha / 3.0 * log_n);
    } else {
        if (!(p.theta > 1.0)) {
            throw DomainError("center_scale: theta scaling needs theta > 1 (sigma > 0), got theta=" +
                              std::to_string(p.theta));
        }
        const double root = std::sqrt(p.theta * p.theta - 1.0);
        out.scale = std::sqrt(alpha * std::log((p.theta + root) / (2.0 * root)));
    }
    return out;
}

Standardized standardize(const SignedLogDet& d, const EdgeParams& p, double alpha, CltVariant variant,
                         std::optional<double> h) {
    if (d.is_singular()) {
        throw SingularDeterminant("standardize: determinant is exactly zero");
    }
    const CenterScale cs = center_scale(p, alpha, variant, h);
    return {(d.log_abs - cs.center) / cs.scale, cs.center, cs.scale, d.log_abs};
}

double deterministic_shift_exact(const EdgeParams& p) {
    const double scale = p.n_theta_sq();
    if (!p.real_root_regime()) {
        throw DomainError("deterministic_shift_exact: needs theta >= sqrt(1 - 1/N)");
    }
    double sum = 0.0;
    double compensation = 0.0;
    for (std::size_t i = 1; i <= p.n; ++i) {
        const double x = 1.0 - static_cast<double>(i - 1) / scale;
        const double y = std::log1p(std::sqrt(x)) - compensation;  // Kahan
        const double t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    return 0.5 * static_cast<double>(p.n) * std::log(p.theta * p.theta) + sum;
}

double deterministic_shift_asymptotic(const EdgeParams& p) {
    if (!(p.w > 0.0)) {
        throw DomainError("deterministic_shift_asymptotic: w must be positive");
    }
    const double n = static_cast<double>(p.n);
    return 0.5 * n + 2.0 * p.w * std::cbrt(n) - (2.0 / 3.0) * std::pow(2.0 * p.w, 1.5) +
           0.5 * std::numbers::ln2;
}

}  // namespace edgelogdet
