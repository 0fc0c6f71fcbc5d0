#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "edgelogdet/edge_params.hpp"
#include "edgelogdet/logdet.hpp"

namespace edgelogdet {

enum class Scaling {
    log_n,  // sqrt((alpha/3) log N)
    theta,  // sqrt(alpha log((theta + sqrt(theta^2-1)) / (2 sqrt(theta^2-1)))), theta > 1
};

enum class SpikeMode { none, subcritical, critical, supercritical };

struct CltVariant {
    Scaling scaling = Scaling::log_n;
    SpikeMode spike_mode = SpikeMode::none;
};

/// none for h = 0, subcritical for 0 < h < 1, critical for h = 1, supercritical above.
SpikeMode classify_spike(double h);

std::string_view to_string(Scaling s) noexcept;
std::string_view to_string(SpikeMode m) noexcept;

struct CenterScale {
    double center = 0.0;
    double scale = 1.0;
    // Supercritical spike at fixed sigma: the log|1-h| offset is a finite-sample
    // correction outside the proven regime.
    bool unproven_regime = false;
};

struct Standardized {
    double z = 0.0;
    double center = 0.0;
    double scale = 1.0;
    double raw = 0.0;
};

EdgeParams theta_from_sigma(std::size_t n, double sigma);

/// center = N/2 - ((alpha-1)/6) log N + sigma N^{1/3} - (2/3)|sigma|^{3/2}
///          - [critical] (1/3) log N + [supercritical] log|1-h|.
/// Throws DomainError for the theta scaling with theta <= 1 and
/// InvalidParameter when the spike mode does not match h.
CenterScale center_scale(const EdgeParams& p, double alpha, CltVariant variant,
                         std::optional<double> h = std::nullopt);

/// Throws SingularDeterminant when d.sign == 0.
Standardized standardize(const SignedLogDet& d, const EdgeParams& p, double alpha, CltVariant variant,
                         std::optional<double> h = std::nullopt);

/// (N/2) log theta^2 + sum_{i=1}^N log(1 + sqrt(1 - (i-1)/(N theta^2))), compensated sum.
/// Throws DomainError unless theta >= sqrt(1 - 1/N).
double deterministic_shift_exact(const EdgeParams& p);

/// N/2 + 2 w N^{1/3} - (2/3)(2w)^{3/2} + (1/2) log 2. Throws DomainError if w <= 0.
double deterministic_shift_asymptotic(const EdgeParams& p);

}  // namespace edgelogdet
