#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "edgelogdet/clt.hpp"
#include "edgelogdet/edge_process.hpp"
#include "edgelogdet/ensemble.hpp"
#include "edgelogdet/format.hpp"
#include "edgelogdet/logdet.hpp"
#include "edgelogdet/rng.hpp"

namespace edgelogdet::cli {

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

double loglog(double n) { return std::log(std::log(n)); }

Outcome oracle_equivalence(std::uint64_t seed) {
    double worst = 0.0;
    int sign_mismatches = 0;
    for (std::size_t n : {8u, 64u, 256u}) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            for (double sigma : {-2.0, 0.0, 1.0, std::log(static_cast<double>(n))}) {
                const EdgeParams p = EdgeParams::from_sigma(n, sigma);
                for (std::size_t rep = 0; rep < 10; ++rep) {
                    RngStream rng(seed, campaign_stream_index(n, rep));
                    const TridiagonalMatrix m = sample_tridiagonal({n, alpha, 0.0}, rng);
                    const SignedLogDet a = logabsdet_recurrence(m, p);
                    const SignedLogDet b = logabsdet_from_eigs(eigenvalues_bisection(m), p);
                    sign_mismatches += a.sign != b.sign;
                    worst = std::max(worst, std::fabs(a.log_abs - b.log_abs) / std::max(1.0, std::fabs(a.log_abs)));
                }
            }
        }
    }
    return {worst <= 1e-8 && sign_mismatches == 0,
            "max relative gap " + format_double(worst) + ", sign mismatches " + std::to_string(sign_mismatches)};
}

Outcome trace_reconstruction(std::uint64_t seed) {
    const std::size_t n = 4096;
    const EdgeParams p = EdgeParams::from_sigma(n, 5.0);
    const double shift = deterministic_shift_exact(p);
    double worst = 0.0;
    double worst_gap = 0.0;
    for (std::size_t rep = 0; rep < 5; ++rep) {
        RngStream rng(seed, campaign_stream_index(n, rep));
        const TridiagonalMatrix m = sample_tridiagonal({n, 1.0, 0.0}, rng);
        const EdgeTrace trace = compute_trace(m, p);
        const double direct = logabsdet_recurrence(m, p).log_abs;
        worst = std::max(worst, std::fabs(trace.e_log[n] + shift - direct) / std::max(1.0, std::fabs(direct)));
        if (!trace.flagged()) {
            worst_gap = std::max(worst_gap, std::fabs(exp_consistency_gap(trace)));
        }
    }
    return {worst <= 1e-6 && worst_gap <= 1e-6 * static_cast<double>(n),
            "relative gap " + format_double(worst) + ", exp-consistency gap " + format_double(worst_gap)};
}

Outcome spike_identity(std::uint64_t seed) {
    const std::size_t n = 16;
    const double h = 1.0;
    const EdgeParams p = EdgeParams::from_sigma(n, 2.0);
    const double r_n = edge_quantities(n, p).r;
    double worst = 0.0;
    for (std::size_t rep = 0; rep < 20; ++rep) {
        RngStream rng(seed, campaign_stream_index(n, rep));
        const TridiagonalMatrix m = sample_tridiagonal({n, 1.0, 0.0}, rng);
        const double before = logabsdet_recurrence(m, p).log_abs;
        const double after = logabsdet_recurrence(apply_spike(m, h), p).log_abs;
        const double r_last = compute_trace(m, p).r_series[n];
        const double predicted = std::log(std::fabs(1.0 - (h / (p.theta * r_n)) / (1.0 - r_last)));
        worst = std::max(worst, std::fabs((after - before) - predicted));
    }
    return {worst <= 1e-8, "max gap " + format_double(worst)};
}

Outcome shift_consistency() {
    const auto gap = [](double n, double w) {
        const EdgeParams p = EdgeParams::from_sigma(static_cast<std::size_t>(n), 2.0 * w);
        return std::fabs(deterministic_shift_exact(p) - deterministic_shift_asymptotic(p));
    };
    const double at_w5 = gap(1e6, 5.0);
    const double bound = 5.0 * std::pow(5.0, -1.5);
    const double w10_small = gap(1e6, 10.0);
    const double w10_large = gap(1e8, 10.0);
    return {at_w5 <= bound && w10_large < w10_small,
            "N=1e6 w=5: " + format_double(at_w5) + " (bound " + format_double(bound) + "); w=10: N=1e6 " +
                format_double(w10_small) + " -> N=1e8 " + format_double(w10_large)};
}

Outcome g_bounds() {
    const std::size_t n = 100000;
    const double log_n = std::log(static_cast<double>(n));
    const double w = 1.1 * loglog(static_cast<double>(n)) * loglog(static_cast<double>(n));
    const EdgeParams p = EdgeParams::from_sigma(n, 2.0 * w);
    const IndexedSeries g = g_weights(p);
    const auto last = static_cast<std::size_t>(static_cast<double>(n) - std::cbrt(static_cast<double>(n)));
    double low = INFINITY;
    double high = 0.0;
    for (std::size_t i = 3; i <= last; ++i) {
        const double r = edge_quantities(i, p).r;
        const double base = r / (2.0 * (r - 1.0));
        low = std::min(low, g[i] / (base * (1.0 - 1.0 / (log_n * log_n))));
        high = std::max(high, g[i] / (base * (1.0 + std::pow(w, -1.5))));
    }
    return {low > 1.0 && high < 1.0,
            "min lower ratio " + format_double(low) + ", max upper ratio " + format_double(high)};
}

Outcome variance_identity() {
    const auto ratio = [](std::size_t n) {
        const double ll = loglog(static_cast<double>(n));
        const SumVariance v = predicted_sum_variance(EdgeParams::from_sigma(n, 2.0 * ll * ll), 1.0);
        return v.exact / v.closed_form;
    };
    const double small = ratio(10000);
    const double large = ratio(1000000);
    return {small >= 0.85 && small <= 1.15 && std::fabs(large - 1.0) < std::fabs(small - 1.0),
            "ratio N=1e4 " + format_double(small) + ", N=1e6 " + format_double(large)};
}

Outcome variance_and_delta_bounds() {
    const std::size_t n = 10000;
    const double nd = static_cast<double>(n);
    const EdgeParams p = EdgeParams::from_sigma(n, 5.0);
    const IndexedSeries v = l_variance_profile(p, 1.0);
    double variance_c = 0.0;
    double delta_c = 0.0;
    for (std::size_t i = 3; i <= n; ++i) {
        const EdgeQuantities q = edge_quantities(i, p);
        const double lead = 2.0 / (p.n_theta_sq() * q.r * q.r * q.r);
        variance_c = std::max(variance_c, std::fabs(xi_variance_exact(i, p, 1.0) - lead) / lead * nd * (q.r - 1.0));
        const double rm1 = q.r - 1.0;
        delta_c = std::max(delta_c, std::fabs(q.gamma * v[i - 1] - q.delta) * nd * nd * rm1 * rm1 * rm1 * rm1);
    }
    return {variance_c <= 2.0 && delta_c <= 50.0,
            "variance constant " + format_double(variance_c) + " (<= 2), delta constant " + format_double(delta_c) +
                " (<= 50)"};
}

Outcome t_delta_leading_term() {
    const std::size_t n = 100000;
    const double nd = static_cast<double>(n);
    const double total = t_delta_sum(EdgeParams::from_sigma(n, 5.0));
    const double excess = std::fabs(total - std::log(nd) / 6.0);
    return {excess <= 5.0 * loglog(nd), "sum " + format_double(total) + ", |sum - log(N)/6| " + format_double(excess)};
}

}  // namespace

int run_verify_suite(std::uint64_t seed, std::ostream& out) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
        {"oracle_equivalence", [seed] { return oracle_equivalence(seed); }},
        {"trace_reconstruction", [seed] { return trace_reconstruction(seed); }},
        {"spike_identity", [seed] { return spike_identity(seed); }},
        {"shift_consistency", shift_consistency},
        {"g_bounds", g_bounds},
        {"variance_identity", variance_identity},
        {"variance_and_delta_bounds", variance_and_delta_bounds},
        {"t_delta_leading_term", t_delta_leading_term},
    };
    int failures = 0;
    for (const auto& [name, check] : checks) {
        const Outcome o = check();
        failures += !o.passed;
        out << (o.passed ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
    }
    return failures;
}

}  // namespace edgelogdet::cli
