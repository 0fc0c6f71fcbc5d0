#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "edgelogdet/edge_params.hpp"
#include "edgelogdet/ensemble.hpp"

namespace edgelogdet {

/// A real sequence indexed first_index() .. last_index().
class IndexedSeries {
public:
    IndexedSeries() = default;
    IndexedSeries(std::size_t first, std::vector<double> values)
        : first_(first), values_(std::move(values)) {}

    [[nodiscard]] std::size_t first_index() const noexcept { return first_; }
    [[nodiscard]] std::size_t last_index() const noexcept { return first_ + values_.size() - 1; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] bool contains(std::size_t i) const noexcept {
        return i >= first_ && i - first_ < values_.size();
    }

    double operator[](std::size_t i) const { return values_[i - first_]; }
    double& operator[](std::size_t i) { return values_[i - first_]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t first_ = 0;
    std::vector<double> values_;
};

/// Deterministic recurrence coefficients at index i:
///   r_i = 1 + sqrt(1 - (i-1)/(N theta^2)),  m_i = 2 - r_i,
///   gamma_i = m_i / r_i,                    delta_i = m_i / r_i - m_i / r_{i-1}.
struct EdgeQuantities {
    std::size_t i = 1;
    double r = 2.0;
    double m = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

/// Throws RegimeError if (i - 1) > N theta^2 or i is outside 1..N.
/// m and delta are evaluated in cancellation-free product form.
EdgeQuantities edge_quantities(std::size_t i, const EdgeParams& p);

/// log|rho_j^+|: log(theta sqrt(N) + sqrt(theta^2 N - (j-1))) while the
/// discriminant is nonnegative, else log sqrt(j - 1) (modulus of the complex pair).
double rho_plus_log_modulus(std::size_t j, const EdgeParams& p);

/// Noise terms of the normalized recurrence at index i >= 2:
///   alpha_i = a_i / (sqrt(N) theta r_i),
///   beta_i  = sqrt(m_i / r_i) c_{i-1} / (sqrt(N) theta r_{i-1}),
///   c_{i-1} = (b_{i-1}^2 - (i-1)) / sqrt(i-1),   xi_i = alpha_i + beta_i.
struct XiInputs {
    double c_prev = 0.0;
    double alpha_i = 0.0;
    double beta_i = 0.0;
    double xi_i = 0.0;
};

XiInputs xi_inputs(const TridiagonalMatrix& m, const EdgeParams& p, std::size_t i);

enum class TraceFlag : std::uint8_t {
    none = 0,
    near_singular = 1,  // |1 - R_{i-1}| < 1e-12: R_i taken from the D recurrence
    from_determinant = 2,  // after an earlier flag: R_i taken from the D recurrence
};

/// Per-index diagnostics of one matrix. e_sign / e_log / flags are indexed
/// 0..N with entry 0 holding E_0 = 1.
struct EdgeTrace {
    EdgeParams params;
    std::vector<int> e_sign;
    std::vector<double> e_log;
    IndexedSeries r_series;                // R_i, i = 2..N (empty if not requested)
    std::optional<IndexedSeries> l_series;  // L_i, i = 2..N
    std::vector<TraceFlag> flags;

    [[nodiscard]] bool flagged() const noexcept;
};

struct TraceOptions {
    bool with_r = true;
    bool with_l = false;
};

/// E_i = D_i / prod_{j<=i} |rho_j^+| from the binary-renormalized determinant
/// recurrence (any theta > 0). R_i starts from the closed form of R_2 and
/// follows R_i = alpha_i - gamma_i + (gamma_i + beta_i - delta_i)/(1 - R_{i-1});
/// L_2 = 0, L_i = xi_i + gamma_i L_{i-1}. R and L need the real-root regime
/// (RegimeError otherwise).
EdgeTrace compute_trace(const TridiagonalMatrix& m, const EdgeParams& p, TraceOptions options = {});

/// log|E_N| - (log|E_2| + sum_{i=3}^N log|1 - R_i|). Zero up to rounding on an
/// unflagged trace. Requires r_series and N >= 2.
double exp_consistency_gap(const EdgeTrace& trace);

/// g_i = 1 + gamma_i g_{i+1}, g_{N+1} = 1, for i = 3..N+1.
IndexedSeries g_weights(const EdgeParams& p);

/// E xi_i^2 = alpha/(N theta^2 r_i^2) + alpha m_i r_i / (N theta^2 r_i^2 r_{i-1}^2), i >= 3.
double xi_variance_exact(std::size_t i, const EdgeParams& p, double alpha);

struct SumVariance {
    double exact = 0.0;        // sum_{i=3}^N g_{i+1}^2 E xi_i^2
    double closed_form = 0.0;  // alpha log((theta + sqrt(theta^2-1)) / (2 sqrt(theta^2-1)))
};

/// Throws DomainError if theta <= 1.
SumVariance predicted_sum_variance(const EdgeParams& p, double alpha);

/// V_i = E L_i^2: V_2 = 0, V_i = E xi_i^2 + gamma_i^2 V_{i-1}, i = 2..N.
IndexedSeries l_variance_profile(const EdgeParams& p, double alpha);

/// sum_{i=3}^N T_{delta,i}, T_{delta,i} = delta_i + gamma_i T_{delta,i-1},
/// accumulated backwards as sum_j delta_j g_{j+1}.
double t_delta_sum(const EdgeParams& p);

/// The forward partial sums T_{delta,i}, i = 3..N.
IndexedSeries t_delta_series(const EdgeParams& p);

/// Trace CSV: `i,e_sign,e_log,R,L,flag`, rows i = 1..N, blanks where absent.
void write_trace_csv(std::ostream& out, const EdgeTrace& trace);

/// Scatter CSV `i,E_i,E_im1` for i = 2..N with E = sign * exp(e_log),
/// saturated at +-1e300.
void write_scatter_csv(std::ostream& out, const EdgeTrace& trace);

inline constexpr double kScatterCap = 1e300;

}  // namespace edgelogdet
