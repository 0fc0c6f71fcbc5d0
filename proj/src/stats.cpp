#include "edgelogdet/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "edgelogdet/errors.hpp"
#include "edgelogdet/format.hpp"
#include "edgelogdet/logdet.hpp"
#include "edgelogdet/parallel.hpp"
#include "edgelogdet/rng.hpp"

namespace edgelogdet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_real(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw InvalidParameter("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sigma rules and campaigns

double SigmaRule::sigma_for(std::size_t n) const {
    const double loglog = std::log(std::log(static_cast<double>(n)));
    switch (kind) {
        case Kind::constant: return c;
        case Kind::loglog_sq: return c * loglog * loglog;
        case Kind::loglog_cube: return c * loglog * loglog * loglog;
    }
    return c;
}

std::string SigmaRule::to_string() const {
    const char* prefix = kind == Kind::constant ? "const:" : kind == Kind::loglog_sq ? "loglog2:" : "loglog3:";
    return prefix + format_double(c);
}

SigmaRule SigmaRule::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        return {Kind::constant, parse_real(text, "sigma rule")};
    }
    const std::string_view head = text.substr(0, colon);
    const double c = parse_real(text.substr(colon + 1), "sigma rule constant");
    if (head == "const") return {Kind::constant, c};
    if (head == "loglog2") return {Kind::loglog_sq, c};
    if (head == "loglog3") return {Kind::loglog_cube, c};
    throw InvalidParameter("unknown sigma rule '" + std::string(head) + "' (expected const, loglog2, loglog3)");
}

void BatchConfig::validate() const {
    if (reps < 1 || reps > 0xffffffffu) {
        throw InvalidParameter("campaign: reps must be in 1..2^32-1");
    }
    if (n_list.empty()) {
        throw InvalidParameter("campaign: n_list is empty");
    }
    EnsembleSpec{1, alpha, spike}.validate();
    for (std::size_t n : n_list) {
        if (n < 1 || n > 0xffffffffu) {
            throw InvalidParameter("campaign: every n must be in 1..2^32-1");
        }
        // Throws for theta scaling at theta <= 1 and for a spike-mode mismatch.
        center_scale(EdgeParams::from_sigma(n, sigma_rule.sigma_for(n)), alpha, variant, spike);
    }
}

std::vector<std::string> BatchConfig::warnings() const {
    std::vector<std::string> out;
    for (std::size_t n : n_list) {
        const double sigma = sigma_rule.sigma_for(n);
        const double log_n = std::log(static_cast<double>(n));
        if (sigma >= log_n * log_n) {
            out.push_back("n=" + std::to_string(n) + ": sigma=" + format_double(sigma) +
                          " >= log^2 N; outside the slowly-growing sigma regime");
        }
    }
    if (variant.spike_mode == SpikeMode::supercritical) {
        out.emplace_back("supercritical spike: centering includes log|1-h|, unproven regime at fixed sigma");
    }
    return out;
}

CampaignResult run_campaign(const BatchConfig& cfg, unsigned threads) {
    cfg.validate();
    CampaignResult result;
    result.warnings = cfg.warnings();
    result.records.resize(cfg.n_list.size() * cfg.reps);

    parallel_for(result.records.size(), threads, [&](std::size_t job) {
        const std::size_t n = cfg.n_list[job / cfg.reps];
        const std::size_t rep = job % cfg.reps;
        const EdgeParams p = EdgeParams::from_sigma(n, cfg.sigma_rule.sigma_for(n));
        RngStream rng(cfg.master_seed, campaign_stream_index(n, rep));
        const TridiagonalMatrix m = sample_ensemble({n, cfg.alpha, cfg.spike}, rng);
        const SignedLogDet d = logabsdet_recurrence(m, p);

        CampaignRecord& rec = result.records[job];
        rec.n = n;
        rec.rep = rep;
        if (d.is_singular()) {
            rec.raw_logdet = d.log_abs;
            rec.z = kNaN;
            rec.skipped = true;
            return;
        }
        const Standardized s = standardize(d, p, cfg.alpha, cfg.variant, cfg.spike);
        rec.raw_logdet = s.raw;
        rec.z = s.z;
    });
    return result;
}

std::vector<double> z_values(const CampaignResult& result, std::size_t n) {
    std::vector<double> z;
    for (const CampaignRecord& rec : result.records) {
        if (rec.n == n && !rec.skipped) {
            z.push_back(rec.z);
        }
    }
    return z;
}

// ---------------------------------------------------------------------------
// Summaries and Kolmogorov-Smirnov

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) {
        return 1.0;
    }
    double q = 0.0;
    if (lambda < 1.18) {
        // Jacobi-transformed series, fast for small lambda.
        const double factor = std::sqrt(2.0 * std::numbers::pi) / lambda;
        const double base = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double sum = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * base);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        q = 1.0 - factor * sum;
    } else {
        double sign = 1.0;
        for (int k = 1; k <= 100; ++k) {
            const double term = std::exp(-2.0 * k * k * lambda * lambda);
            q += sign * term;
            sign = -sign;
            if (term < 1e-18) break;
        }
        q *= 2.0;
    }
    return std::clamp(q, 0.0, 1.0);
}

double ks_distance_normal(std::span<const double> samples) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = normal_cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return d;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw InsufficientData("ks_two_sample: both samples must be nonempty");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double vx = x[i];
        const double vy = y[j];
        if (vx <= vy) {
            while (i < x.size() && x[i] == vx) ++i;
        }
        if (vy <= vx) {
            while (j < y.size() && y[j] == vy) ++j;
        }
        d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    const double effective = std::sqrt(nx * ny / (nx + ny));
    return {d, kolmogorov_survival(effective * d)};
}

SummaryStats summarize(std::span<const double> samples) {
    if (samples.empty()) {
        throw InsufficientData("summarize: no samples");
    }
    SummaryStats s;
    s.count = samples.size();
    const double n = static_cast<double>(s.count);

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    s.mean = mean;
    s.variance = s.count >= 2 ? m2 * n / (n - 1.0) : kNaN;
    s.skewness = kNaN;
    s.excess_kurtosis = kNaN;
    if (m2 > 0.0) {
        const double g1 = m3 / std::pow(m2, 1.5);
        const double g2 = m4 / (m2 * m2) - 3.0;
        if (s.count >= 3) {
            s.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
        }
        if (s.count >= 4) {
            s.excess_kurtosis = (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
        }
    }
    s.ks_distance = ks_distance_normal(samples);
    s.ks_p_value = s.count >= 8 ? kolmogorov_survival(std::sqrt(n) * s.ks_distance) : kNaN;
    return s;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw InsufficientData("median: no values");
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// ---------------------------------------------------------------------------
// Stieltjes sums and scaling fits

StieltjesSums stieltjes_sums(std::span<const double> scaled_eigs, const EdgeParams& p) {
    if (scaled_eigs.size() != p.n) {
        throw InvalidInput("stieltjes_sums: expected " + std::to_string(p.n) + " eigenvalues");
    }
    const double edge = 2.0 * p.theta;
    StieltjesSums out;
    for (double lambda : scaled_eigs) {
        const double mu = edge - lambda;
        if (mu == 0.0) {
            throw SingularDeterminant("stieltjes_sums: eigenvalue at the singularity");
        }
        out.s1 += 1.0 / mu;
        out.s2 += 1.0 / (mu * mu);
    }
    out.s1 -= static_cast<double>(p.n);
    return out;
}

StieltjesSums stieltjes_sums_recurrence(const TridiagonalMatrix& m, const EdgeParams& p) {
    m.validate();
    if (m.size() != p.n) {
        throw InvalidInput("stieltjes_sums_recurrence: size mismatch");
    }
    const double n = static_cast<double>(p.n);
    const double root = std::sqrt(n);
    const double s = 2.0 * p.theta;

    // q_i: pivots of s - M/sqrt(N); t_i = q_i'/q_i, u_i = q_i''/q_i (derivatives in s).
    double q = s - m.diag[0] / root;
    if (q == 0.0) {
        throw SingularDeterminant("stieltjes_sums_recurrence: zero pivot");
    }
    double t = 1.0 / q;
    double u = 0.0;
    double sum1 = t;
    double sum2 = t * t - u;
    for (std::size_t i = 1; i < p.n; ++i) {
        const double b = m.offdiag[i - 1];
        const double kappa = (b * b / n) / q;
        q = (s - m.diag[i] / root) - kappa;
        if (q == 0.0) {
            throw SingularDeterminant("stieltjes_sums_recurrence: zero pivot");
        }
        const double t_next = (1.0 + kappa * t) / q;
        u = kappa * (u - 2.0 * t * t) / q;
        t = t_next;
        sum1 += t;
        sum2 += t * t - u;
    }
    return {sum1 - n, sum2};
}

double scaling_exponent_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) {
        throw InvalidParameter("scaling_exponent_fit: need at least 3 points");
    }
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [n, value] : points) {
        if (!(n > 0.0) || value == 0.0 || !std::isfinite(value)) {
            throw InvalidParameter("scaling_exponent_fit: n must be positive and values nonzero");
        }
        mean_x += std::log(n);
        mean_y += std::log(std::fabs(value));
    }
    const double count = static_cast<double>(points.size());
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [n, value] : points) {
        const double dx = std::log(n) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(std::fabs(value)) - mean_y);
    }
    if (!(sxx > 0.0)) {
        throw InvalidParameter("scaling_exponent_fit: degenerate abscissae");
    }
    return sxy / sxx;
}

std::vector<StieltjesRecord> run_stieltjes_campaign(const StieltjesConfig& cfg, unsigned threads) {
    if (cfg.reps < 1 || cfg.n_list.empty()) {
        throw InvalidParameter("stieltjes campaign: need reps >= 1 and a nonempty n_list");
    }
    EnsembleSpec{1, cfg.alpha, 0.0}.validate();
    std::vector<StieltjesRecord> records(cfg.n_list.size() * cfg.reps);
    parallel_for(records.size(), threads, [&](std::size_t job) {
        const std::size_t n = cfg.n_list[job / cfg.reps];
        const std::size_t rep = job % cfg.reps;
        const EdgeParams p = EdgeParams::from_sigma(n, cfg.sigma);
        RngStream rng(cfg.master_seed, campaign_stream_index(n, rep));
        const TridiagonalMatrix m = sample_tridiagonal({n, cfg.alpha, 0.0}, rng);
        StieltjesRecord& rec = records[job];
        rec.n = n;
        rec.rep = rep;
        if (cfg.method == StieltjesMethod::recurrence) {
            rec.sums = stieltjes_sums_recurrence(m, p);
        } else {
            std::vector<double> eigs = eigenvalues_bisection(m);
            const double root = std::sqrt(static_cast<double>(n));
            for (double& e : eigs) e /= root;
            rec.sums = stieltjes_sums(eigs, p);
        }
    });
    return records;
}

StieltjesFit fit_stieltjes_exponents(std::span<const StieltjesRecord> records) {
    StieltjesFit fit;
    for (const StieltjesRecord& rec : records) {
        if (std::find(fit.n.begin(), fit.n.end(), rec.n) == fit.n.end()) {
            fit.n.push_back(rec.n);
        }
    }
    std::vector<std::pair<double, double>> s1_points;
    std::vector<std::pair<double, double>> s2_points;
    for (std::size_t n : fit.n) {
        std::vector<double> abs_s1;
        std::vector<double> s2;
        for (const StieltjesRecord& rec : records) {
            if (rec.n == n) {
                abs_s1.push_back(std::fabs(rec.sums.s1));
                s2.push_back(rec.sums.s2);
            }
        }
        fit.median_abs_s1.push_back(median(abs_s1));
        fit.median_s2.push_back(median(s2));
        s1_points.emplace_back(static_cast<double>(n), fit.median_abs_s1.back());
        s2_points.emplace_back(static_cast<double>(n), fit.median_s2.back());
    }
    fit.s1_slope = scaling_exponent_fit(s1_points);
    fit.s2_slope = scaling_exponent_fit(s2_points);
    return fit;
}

// ---------------------------------------------------------------------------
// GOE -> GUE decimation

std::vector<double> decimated_spectrum(std::span<const double> first, std::span<const double> second) {
    std::vector<double> merged(first.begin(), first.end());
    merged.insert(merged.end(), second.begin(), second.end());
    std::sort(merged.begin(), merged.end(), std::greater<>());
    std::vector<double> even;
    even.reserve(merged.size() / 2);
    for (std::size_t k = 1; k < merged.size(); k += 2) {
        even.push_back(merged[k]);
    }
    return even;
}

DecimationReport decimation_check(std::size_t n, std::size_t reps, std::uint64_t seed, unsigned threads,
                                  double control_shift) {
    if (n < 2) {
        throw InvalidParameter("decimation_check: n must be >= 2");
    }
    if (reps < 1) {
        throw InvalidParameter("decimation_check: reps must be >= 1");
    }
    DecimationReport report;
    report.n = n;
    report.reps = reps;
    report.control_shift = control_shift;
    report.decimated_largest.resize(reps);
    report.gue_largest.resize(reps);

    parallel_for(reps, threads, [&](std::size_t rep) {
        RngStream rng(seed, rep);
        const TridiagonalMatrix goe_n = sample_tridiagonal({n, 2.0, 0.0}, rng);
        const TridiagonalMatrix goe_n1 = sample_tridiagonal({n + 1, 2.0, 0.0}, rng);
        const TridiagonalMatrix gue = sample_tridiagonal({n, 1.0, 0.0}, rng);
        const std::vector<double> even =
            decimated_spectrum(eigenvalues_bisection(goe_n), eigenvalues_bisection(goe_n1));
        report.decimated_largest[rep] = even.front();
        report.gue_largest[rep] = eigenvalues_bisection(gue).back();
    });

    report.identity = ks_two_sample(report.decimated_largest, report.gue_largest);
    std::vector<double> shifted = report.gue_largest;
    for (double& v : shifted) v += control_shift;
    report.shifted_control = ks_two_sample(report.decimated_largest, shifted);
    return report;
}

// ---------------------------------------------------------------------------
// CSV

void write_samples_csv(std::ostream& out, const CampaignResult& result) {
    out << "n,rep,raw_logdet,z,skip_flag\n";
    for (const CampaignRecord& rec : result.records) {
        out << rec.n << ',' << rec.rep << ',' << format_double(rec.raw_logdet) << ',' << format_double(rec.z)
            << ',' << (rec.skipped ? 1 : 0) << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const std::pair<std::size_t, SummaryStats>> rows) {
    out << "n,count,mean,variance,skewness,excess_kurtosis,ks_distance,ks_p_value\n";
    for (const auto& [n, s] : rows) {
        out << n << ',' << s.count << ',' << format_double(s.mean) << ',' << format_double(s.variance) << ','
            << format_double(s.skewness) << ',' << format_double(s.excess_kurtosis) << ','
            << format_double(s.ks_distance) << ',' << format_double(s.ks_p_value) << '\n';
    }
}

}  // namespace edgelogdet
