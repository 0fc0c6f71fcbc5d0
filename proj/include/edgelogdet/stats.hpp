#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgelogdet/clt.hpp"
#include "edgelogdet/edge_params.hpp"
#include "edgelogdet/ensemble.hpp"

namespace edgelogdet {

/// sigma_N as a function of N: c, c (log log N)^2 or c (log log N)^3.
struct SigmaRule {
    enum class Kind { constant, loglog_sq, loglog_cube };
    Kind kind = Kind::constant;
    double c = 0.0;

    [[nodiscard]] double sigma_for(std::size_t n) const;
    [[nodiscard]] std::string to_string() const;

    /// "const:C", "loglog2:C" or "loglog3:C". Throws InvalidParameter.
    static SigmaRule parse(std::string_view text);
};

struct BatchConfig {
    std::uint64_t master_seed = 0;
    std::size_t reps = 1;
    std::vector<std::size_t> n_list;
    SigmaRule sigma_rule;
    double alpha = 1.0;
    double spike = 0.0;
    CltVariant variant;

    /// Throws InvalidParameter / DomainError for configurations that cannot run
    /// (reps = 0, empty n_list, theta scaling with theta <= 1, spike mismatch, ...).
    void validate() const;
    /// Soft problems, e.g. sigma_N >= log^2 N (outside the slowly-growing regime).
    [[nodiscard]] std::vector<std::string> warnings() const;
};

struct CampaignRecord {
    std::size_t n = 0;
    std::size_t rep = 0;
    double raw_logdet = 0.0;
    double z = 0.0;
    bool skipped = false;  // exactly singular determinant
};

struct CampaignResult {
    std::vector<CampaignRecord> records;  // ordered by (position in n_list, rep)
    std::vector<std::string> warnings;
};

/// Replicate r of size N samples from RngStream(master_seed, campaign_stream_index(N, r)).
CampaignResult run_campaign(const BatchConfig& cfg, unsigned threads = 1);

/// z values of the non-skipped records with the given N.
std::vector<double> z_values(const CampaignResult& result, std::size_t n);

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;         // unbiased; NaN if count < 2
    double skewness = 0.0;         // adjusted Fisher-Pearson; NaN if count < 3
    double excess_kurtosis = 0.0;  // unbiased estimator; NaN if count < 4
    double ks_distance = 0.0;      // against N(0, 1)
    double ks_p_value = 0.0;       // asymptotic; NaN if count < 8
};

/// Throws InsufficientData on an empty sample.
SummaryStats summarize(std::span<const double> samples);

/// Phi(x) = erfc(-x / sqrt 2) / 2.
double normal_cdf(double x);

/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_survival(double lambda);

/// sup |F_n - Phi|.
double ks_distance_normal(std::span<const double> samples);

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double median(std::vector<double> values);

/// s1 = sum 1/mu_i - N, s2 = sum 1/mu_i^2 with mu_i = 2 + N^{-2/3} sigma - lambda_i.
struct StieltjesSums {
    double s1 = 0.0;
    double s2 = 0.0;
};

/// From scaled eigenvalues (of M / sqrt(N)). Throws SingularDeterminant if some mu_i = 0.
StieltjesSums stieltjes_sums(std::span<const double> scaled_eigs, const EdgeParams& p);

/// Same sums without eigenvalues: first and second derivatives of
/// log|det(s - M/sqrt(N))| at s = 2 theta, carried through the Sturm pivot
/// recurrence as ratios q'/q and q''/q.
StieltjesSums stieltjes_sums_recurrence(const TridiagonalMatrix& m, const EdgeParams& p);

/// Least-squares slope of log|value| against log n. Needs >= 3 points, nonzero
/// values and at least two distinct n.
double scaling_exponent_fit(std::span<const std::pair<double, double>> points);

enum class StieltjesMethod { recurrence, eigen };

struct StieltjesConfig {
    std::uint64_t master_seed = 0;
    std::size_t reps = 1;
    std::vector<std::size_t> n_list;
    double sigma = 1.0;
    double alpha = 1.0;
    StieltjesMethod method = StieltjesMethod::recurrence;
};

struct StieltjesRecord {
    std::size_t n = 0;
    std::size_t rep = 0;
    StieltjesSums sums;
};

std::vector<StieltjesRecord> run_stieltjes_campaign(const StieltjesConfig& cfg, unsigned threads = 1);

struct StieltjesFit {
    std::vector<std::size_t> n;
    std::vector<double> median_abs_s1;
    std::vector<double> median_s2;
    double s1_slope = 0.0;
    double s2_slope = 0.0;
};

StieltjesFit fit_stieltjes_exponents(std::span<const StieltjesRecord> records);

/// Even-ranked entries (2nd, 4th, ...) of the union of two spectra sorted in
/// decreasing order.
std::vector<double> decimated_spectrum(std::span<const double> first, std::span<const double> second);

struct DecimationReport {
    std::size_t n = 0;
    std::size_t reps = 0;
    double control_shift = 0.0;
    KsResult identity;          // largest decimated value vs largest GUE_N eigenvalue
    KsResult shifted_control;   // same, GUE values shifted by control_shift
    std::vector<double> decimated_largest;
    std::vector<double> gue_largest;
};

/// Replicate r uses RngStream(seed, r) and draws GOE_N, GOE_{N+1} (alpha = 2)
/// and GUE_N (alpha = 1) in that order. Eigenvalues are unscaled.
DecimationReport decimation_check(std::size_t n, std::size_t reps, std::uint64_t seed,
                                  unsigned threads = 1, double control_shift = 0.5);

/// `n,rep,raw_logdet,z,skip_flag`
void write_samples_csv(std::ostream& out, const CampaignResult& result);

/// `n,count,mean,variance,skewness,excess_kurtosis,ks_distance,ks_p_value`
void write_summary_csv(std::ostream& out, std::span<const std::pair<std::size_t, SummaryStats>> rows);

}  // namespace edgelogdet
