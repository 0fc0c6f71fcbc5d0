// Acceptance suite: each check runs at its full size and tolerance and prints
// one PASS/FAIL line. Exit status is the number of failed checks (capped).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "edgelogdet/clt.hpp"
#include "edgelogdet/edge_process.hpp"
#include "edgelogdet/ensemble.hpp"
#include "edgelogdet/logdet.hpp"
#include "edgelogdet/parallel.hpp"
#include "edgelogdet/rng.hpp"
#include "edgelogdet/stats.hpp"

using namespace edgelogdet;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Verdict {
    bool passed = true;
    std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double loglog(double n) { return std::log(std::log(n)); }

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

TridiagonalMatrix draw(std::size_t n, double alpha, std::uint64_t seed, std::uint64_t rep) {
    RngStream s(seed, campaign_stream_index(n, rep));
    return sample_tridiagonal({n, alpha, 0.0}, s);
}

Verdict oracle_equivalence() {
    const std::vector<std::size_t> sizes = {8, 64, 256, 512};
    const std::vector<double> alphas = {0.5, 1.0, 2.0};
    const std::size_t reps = 200;
    struct Slot {
        double worst = 0.0;
        int sign_mismatch = 0;
    };
    std::vector<Slot> slots(sizes.size() * alphas.size() * reps);
    parallel_for(slots.size(), threads(), [&](std::size_t job) {
        const std::size_t n = sizes[job / (alphas.size() * reps)];
        const double alpha = alphas[(job / reps) % alphas.size()];
        const std::size_t rep = job % reps;
        const TridiagonalMatrix m = draw(n, alpha, kSeed, rep);
        const std::vector<double> eigs = eigenvalues_bisection(m);
        for (double sigma : {-2.0, 0.0, 1.0, std::log(static_cast<double>(n))}) {
            const EdgeParams p = EdgeParams::from_sigma(n, sigma);
            const SignedLogDet a = logabsdet_recurrence(m, p);
            const SignedLogDet b = logabsdet_from_eigs(eigs, p);
            slots[job].sign_mismatch += a.sign != b.sign;
            slots[job].worst =
                std::max(slots[job].worst, std::fabs(a.log_abs - b.log_abs) / std::max(1.0, std::fabs(a.log_abs)));
        }
    });
    double worst = 0.0;
    int mismatches = 0;
    for (const Slot& s : slots) {
        worst = std::max(worst, s.worst);
        mismatches += s.sign_mismatch;
    }
    return {worst <= 1e-8 && mismatches == 0, std::to_string(slots.size() * 4) + " comparisons, max relative gap " +
                                                  fmt(worst) + " (<= 1e-8), sign mismatches " +
                                                  std::to_string(mismatches)};
}

Verdict trace_reconstruction() {
    const std::size_t n = 4096;
    const EdgeParams p = EdgeParams::from_sigma(n, 5.0);
    const double shift = deterministic_shift_exact(p);
    double worst = 0.0;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        const TridiagonalMatrix m = draw(n, 1.0, kSeed, rep);
        const EdgeTrace trace = compute_trace(m, p, {false, false});
        const double direct = logabsdet_recurrence(m, p).log_abs;
        worst = std::max(worst, std::fabs(trace.e_log[n] + shift - direct) / std::fabs(direct));
    }
    return {worst <= 1e-6, "50 draws, max relative gap " + fmt(worst) + " (<= 1e-6)"};
}

Verdict shift_asymptotics() {
    const double n = 1e6;
    std::ostringstream detail;
    bool within = true;
    bool decreasing = true;
    double previous = INFINITY;
    for (double w : {5.0, 10.0, 20.0, 40.0}) {
        const EdgeParams p = EdgeParams::from_sigma(static_cast<std::size_t>(n), 2.0 * w);
        const double gap = std::fabs(deterministic_shift_exact(p) - deterministic_shift_asymptotic(p));
        const double bound = 5.0 * std::pow(w, -1.5);
        within &= gap <= bound;
        decreasing &= gap < previous;
        previous = gap;
        detail << "w=" << w << ": " << fmt(gap) << " vs " << fmt(bound) << "; ";
    }
    detail << (decreasing ? "decreasing in w" : "not decreasing in w");
    return {within && decreasing, detail.str()};
}

Verdict variance_identity() {
    const auto ratio = [](std::size_t n) {
        const double ll = loglog(static_cast<double>(n));
        const SumVariance v = predicted_sum_variance(EdgeParams::from_sigma(n, 2.0 * ll * ll), 1.0);
        return v.exact / v.closed_form;
    };
    const double small = ratio(10000);
    const double large = ratio(1000000);
    return {small >= 0.85 && small <= 1.15 && std::fabs(large - 1.0) < std::fabs(small - 1.0),
            "ratio " + fmt(small, 6) + " at N=1e4 (in [0.85, 1.15]), " + fmt(large, 6) + " at N=1e6"};
}

Verdict clt_normality() {
    const std::size_t reps = 4000;
    std::ostringstream detail;
    bool ok = true;
    for (double alpha : {1.0, 2.0}) {
        BatchConfig cfg;
        cfg.master_seed = kSeed;
        cfg.reps = reps;
        cfg.n_list = {128, 8192};
        cfg.sigma_rule = SigmaRule::parse("loglog2:1");
        cfg.alpha = alpha;
        cfg.variant = {Scaling::theta, SpikeMode::none};
        const CampaignResult result = run_campaign(cfg, threads());
        const SummaryStats small = summarize(z_values(result, 128));
        const SummaryStats large = summarize(z_values(result, 8192));
        const bool pass = std::fabs(large.mean) <= 0.35 && std::fabs(large.variance - 1.0) <= 0.35 &&
                          large.ks_distance <= 0.10 && large.ks_distance < small.ks_distance;
        ok &= pass;
        detail << "alpha=" << alpha << (pass ? " ok" : " FAIL") << ": mean " << fmt(large.mean, 3) << ", var "
               << fmt(large.variance, 3) << ", KS " << fmt(large.ks_distance, 3) << " (N=128 KS "
               << fmt(small.ks_distance, 3) << "); ";
    }
    return {ok, detail.str()};
}

Verdict spike_shift() {
    const std::size_t n = 8192;
    const std::size_t reps = 2000;
    const double sigma = 5.0;
    const EdgeParams p = EdgeParams::from_sigma(n, sigma);
    std::vector<double> critical(reps), sub(reps);
    parallel_for(reps, threads(), [&](std::size_t rep) {
        const TridiagonalMatrix m = draw(n, 1.0, kSeed, rep);
        const double base = logabsdet_recurrence(m, p).log_abs;
        critical[rep] = logabsdet_recurrence(apply_spike(m, 1.0), p).log_abs - base;
        sub[rep] = logabsdet_recurrence(apply_spike(m, 0.5), p).log_abs - base;
    });
    const double mean_critical = summarize(critical).mean;
    const double mean_sub = summarize(sub).mean;
    const double target_critical = -std::log(static_cast<double>(n)) / 3.0 + 0.5 * std::log(sigma);
    const double target_sub = std::log(0.5);
    const bool ok = std::fabs(mean_critical - target_critical) <= 0.5 && std::fabs(mean_sub - target_sub) <= 0.3;
    return {ok, "h=1: " + fmt(mean_critical) + " vs " + fmt(target_critical) + " +- 0.5; h=0.5: " + fmt(mean_sub) +
                    " vs " + fmt(target_sub) + " +- 0.3"};
}

Verdict stieltjes_exponents() {
    StieltjesConfig cfg;
    cfg.master_seed = kSeed;
    cfg.reps = 200;
    cfg.n_list = {512, 1024, 2048, 4096, 8192, 16384};
    cfg.sigma = 1.0;
    const StieltjesFit fit = fit_stieltjes_exponents(run_stieltjes_campaign(cfg, threads()));

    // The pivot recurrence stands in for the eigenvalue path; confirm they agree on the smallest size.
    StieltjesConfig check = cfg;
    check.n_list = {512};
    check.reps = 40;
    const std::vector<StieltjesRecord> by_pivots = run_stieltjes_campaign(check, threads());
    check.method = StieltjesMethod::eigen;
    const std::vector<StieltjesRecord> by_eigs = run_stieltjes_campaign(check, threads());
    double worst = 0.0;
    for (std::size_t k = 0; k < by_eigs.size(); ++k) {
        const double scale = 1.0 + by_eigs[k].sums.s2;
        worst = std::max({worst, std::fabs(by_eigs[k].sums.s1 - by_pivots[k].sums.s1) / scale,
                          std::fabs(by_eigs[k].sums.s2 - by_pivots[k].sums.s2) / scale});
    }
    const bool ok = std::fabs(fit.s1_slope - 2.0 / 3.0) <= 0.15 && std::fabs(fit.s2_slope - 4.0 / 3.0) <= 0.15 &&
                    worst <= 1e-7;
    return {ok, "s1 slope " + fmt(fit.s1_slope) + " (2/3 +- 0.15), s2 slope " + fmt(fit.s2_slope) +
                    " (4/3 +- 0.15), pivot vs eigenvalue gap " + fmt(worst)};
}

Verdict decimation() {
    const DecimationReport r = decimation_check(200, 5000, kSeed, threads());
    return {r.identity.p_value > 0.01 && r.shifted_control.p_value < 1e-6,
            "identity p=" + fmt(r.identity.p_value) + " (> 0.01), shifted control p=" +
                fmt(r.shifted_control.p_value) + " (< 1e-6)"};
}

Verdict micro_identities() {
    std::ostringstream detail;
    bool ok = true;

    {
        const std::size_t n = 100000;
        const double nd = static_cast<double>(n);
        const double log_n = std::log(nd);
        const double w = 1.1 * loglog(nd) * loglog(nd);
        const EdgeParams p = EdgeParams::from_sigma(n, 2.0 * w);
        const IndexedSeries g = g_weights(p);
        const auto last = static_cast<std::size_t>(nd - std::cbrt(nd));
        double low = INFINITY, high = 0.0;
        for (std::size_t i = 3; i <= last; ++i) {
            const double r = edge_quantities(i, p).r;
            const double base = r / (2.0 * (r - 1.0));
            low = std::min(low, g[i] / (base * (1.0 - 1.0 / (log_n * log_n))));
            high = std::max(high, g[i] / (base * (1.0 + std::pow(w, -1.5))));
        }
        const bool pass = low > 1.0 && high < 1.0;
        ok &= pass;
        detail << "g sandwich " << (pass ? "ok" : "FAIL") << " (lower " << fmt(low, 5) << " > 1, upper "
               << fmt(high, 5) << " < 1); ";
    }
    {
        const std::size_t n = 10000;
        const double nd = static_cast<double>(n);
        const EdgeParams p = EdgeParams::from_sigma(n, 5.0);
        const IndexedSeries v = l_variance_profile(p, 1.0);
        double var_c = 0.0, delta_c = 0.0;
        for (std::size_t i = 3; i <= n; ++i) {
            const EdgeQuantities q = edge_quantities(i, p);
            const double rm1 = q.r - 1.0;
            const double lead = 2.0 / (p.n_theta_sq() * q.r * q.r * q.r);
            var_c = std::max(var_c, std::fabs(xi_variance_exact(i, p, 1.0) - lead) / lead * nd * rm1);
            delta_c = std::max(delta_c, std::fabs(q.gamma * v[i - 1] - q.delta) * nd * nd * rm1 * rm1 * rm1 * rm1);
        }
        const bool pass_var = var_c <= 2.0;
        const bool pass_delta = delta_c <= 50.0;
        ok &= pass_var && pass_delta;
        detail << "variance epsilon " << (pass_var ? "ok" : "FAIL") << " (C " << fmt(var_c) << " <= 2); "
               << "delta-adjusted " << (pass_delta ? "ok" : "FAIL") << " (C " << fmt(delta_c) << " <= 50); ";
    }
    {
        const std::size_t n = 100000;
        const double nd = static_cast<double>(n);
        const double total = t_delta_sum(EdgeParams::from_sigma(n, 5.0));
        const double excess = std::fabs(total - std::log(nd) / 6.0);
        const bool pass = excess <= 5.0 * loglog(nd);
        ok &= pass;
        detail << "T-delta sum " << (pass ? "ok" : "FAIL") << " (" << fmt(total) << ", |sum - log(N)/6| "
               << fmt(excess) << " <= " << fmt(5.0 * loglog(nd)) << ")";
    }
    return {ok, detail.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> checks = {
        {"oracle-equivalence", oracle_equivalence},
        {"trace-reconstruction", trace_reconstruction},
        {"shift-asymptotics", shift_asymptotics},
        {"variance-identity", variance_identity},
        {"clt-normality", clt_normality},
        {"spike-shift", spike_shift},
        {"stieltjes-exponents", stieltjes_exponents},
        {"decimation-identity", decimation},
        {"micro-identities", micro_identities},
    };
    int failures = 0;
    for (const auto& [name, check] : checks) {
        const auto start = std::chrono::steady_clock::now();
        const Verdict v = check();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.passed;
        std::cout << (v.passed ? "PASS " : "FAIL ") << name << " [" << fmt(seconds, 3) << " s]: " << v.detail
                  << std::endl;
    }
    std::cout << (checks.size() - static_cast<std::size_t>(failures)) << "/" << checks.size() << " passed"
              << std::endl;
    return std::min(failures, 125);
}
