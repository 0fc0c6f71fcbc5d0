#include "edgelogdet/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "edgelogdet/clt.hpp"
#include "edgelogdet/edge_process.hpp"
#include "edgelogdet/ensemble.hpp"
#include "edgelogdet/errors.hpp"
#include "edgelogdet/format.hpp"
#include "edgelogdet/logdet.hpp"
#include "edgelogdet/rng.hpp"
#include "edgelogdet/stats.hpp"
#include "verify.hpp"

namespace edgelogdet::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSeedEnv = "EDGE_LOGDET_SEED";

// Bad --config file; reported like any other invalid configuration.
class ConfigFileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Settings = std::vector<std::pair<std::string, std::string>>;

void print_settings(std::ostream& err, std::string_view command, const Settings& settings) {
    err << "# edge_logdet " << command << '\n';
    for (const auto& [key, value] : settings) {
        err << "#   " << key << " = " << value << '\n';
    }
}

std::string join(const std::vector<std::size_t>& values) {
    std::string s;
    for (std::size_t v : values) {
        if (!s.empty()) s += ',';
        s += std::to_string(v);
    }
    return s;
}

bool mentions_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

// Pulls `--config PATH` out of args and splices the file's key=value pairs in
// right after the subcommand, skipping keys already given on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigFileError("--config needs a path");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) throw ConfigFileError("cannot read config file '" + path + "'");

    const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind('-', 0) != 0; });
    if (sub == args.end()) {
        return args;
    }
    std::vector<std::string> injected;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigFileError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (key.empty() || mentions_flag(args, flag)) continue;
        injected.push_back(flag);
        injected.push_back(trim(line.substr(eq + 1)));
    }
    args.insert(sub + 1, injected.begin(), injected.end());
    return args;
}

// "-" means `fallback`; otherwise the file is created along with its parent directory.
void write_output(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& fill) {
    if (path == "-") {
        fill(fallback);
        return;
    }
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    std::ofstream file(target);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    fill(file);
    file.flush();
    if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

std::uint64_t default_seed() {
    const char* env = std::getenv(kSeedEnv);
    if (env == nullptr || *env == '\0') return 0;
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(env, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != std::string_view(env).size()) {
        throw InvalidParameter(std::string(kSeedEnv) + " is not an unsigned integer: '" + env + "'");
    }
    return value;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

Scaling parse_scaling(const std::string& s) {
    if (s == "thm1") return Scaling::log_n;
    if (s == "thm2") return Scaling::theta;
    throw InvalidParameter("unknown scaling '" + s + "'");
}

std::string gnuplot_script(const fs::path& trace_csv, const fs::path& scatter_csv, const fs::path& png,
                           const EdgeParams& p, bool has_r) {
    std::ostringstream gp;
    gp << "# N = " << p.n << ", 2 theta = " << format_double(2.0 * p.theta) << "\n"
       << "# Run from the directory holding the CSV files: gnuplot " << png.stem().string() << ".gp\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 1500,480\n"
       << "set output '" << png.filename().string() << "'\n"
       << "set multiplot layout 1," << (has_r ? 3 : 2) << "\n"
       << "set title 'E_{i-1} against E_i'\n"
       << "set xlabel 'E_i'\nset ylabel 'E_{i-1}'\n"
       << "plot '" << scatter_csv.filename().string() << "' every ::1 using 2:3 with points pt 7 ps 0.3 notitle\n"
       << "set title 'log|E_i|'\n"
       << "set xlabel 'i'\nset ylabel 'log|E_i|'\n"
       << "plot '" << trace_csv.filename().string() << "' every ::1 using 1:3 with lines notitle\n";
    if (has_r) {
        gp << "set title 'R_i'\n"
           << "set xlabel 'i'\nset ylabel 'R_i'\n"
           << "plot '" << trace_csv.filename().string() << "' every ::2 using 1:4 with points pt 7 ps 0.2 notitle\n";
    }
    gp << "unset multiplot\n";
    return gp.str();
}

int run_sample(std::size_t n, double alpha, double spike, std::uint64_t seed, std::size_t rep,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
    const EnsembleSpec spec{n, alpha, spike};
    spec.validate();
    print_settings(err, "sample",
                   {{"n", std::to_string(n)}, {"alpha", format_double(alpha)}, {"spike", format_double(spike)},
                    {"seed", std::to_string(seed)}, {"rep", std::to_string(rep)},
                    {"rng", std::string(RngStream::algorithm)}, {"out", out_path}});
    RngStream rng(seed, campaign_stream_index(n, rep));
    const TridiagonalMatrix m = sample_ensemble(spec, rng);
    write_output(out_path, out, [&](std::ostream& os) { write_matrix_csv(os, m); });
    return kExitOk;
}

int run_logdet(std::size_t n, double alpha, double sigma, double spike, std::uint64_t seed, std::size_t rep,
               const std::string& method, std::ostream& out, std::ostream& err) {
    const EnsembleSpec spec{n, alpha, spike};
    spec.validate();
    const EdgeParams p = EdgeParams::from_sigma(n, sigma);
    print_settings(err, "logdet",
                   {{"n", std::to_string(n)}, {"alpha", format_double(alpha)}, {"sigma", format_double(sigma)},
                    {"theta", format_double(p.theta)}, {"spike", format_double(spike)},
                    {"seed", std::to_string(seed)}, {"rep", std::to_string(rep)}, {"method", method}});
    RngStream rng(seed, campaign_stream_index(n, rep));
    const TridiagonalMatrix m = sample_ensemble(spec, rng);
    const SignedLogDet d =
        method == "eigen" ? logabsdet_from_eigs(eigenvalues_bisection(m), p) : logabsdet_recurrence(m, p);
    out << "sign=" << d.sign << "\nlog_abs=" << format_double(d.log_abs) << '\n';
    return kExitOk;
}

int run_trace(std::size_t n, double two_theta, double alpha, std::uint64_t seed, std::size_t rep,
              const std::string& out_path, std::ostream& err) {
    EnsembleSpec{n, alpha, 0.0}.validate();
    if (!(two_theta > 0.0)) throw InvalidParameter("--two-theta must be positive");
    if (out_path == "-") throw InvalidParameter("trace writes several files; --out must be a file path");
    const EdgeParams p = EdgeParams::from_two_theta(n, two_theta);
    const bool real = p.real_root_regime();

    const fs::path trace_csv(out_path);
    fs::path stem = trace_csv;
    stem.replace_extension();
    const fs::path scatter_csv = stem.string() + "_scatter.csv";
    const fs::path script = stem.string() + ".gp";
    const fs::path png = stem.string() + ".png";

    print_settings(err, "trace",
                   {{"n", std::to_string(n)}, {"two_theta", format_double(two_theta)},
                    {"sigma", format_double(p.sigma)}, {"theta", format_double(p.theta)},
                    {"alpha", format_double(alpha)}, {"seed", std::to_string(seed)}, {"rep", std::to_string(rep)},
                    {"out", trace_csv.string()}, {"scatter", scatter_csv.string()}, {"script", script.string()}});
    if (!real) {
        err << "# note: complex characteristic roots below index N; R and L columns left blank\n";
    }
    RngStream rng(seed, campaign_stream_index(n, rep));
    const TridiagonalMatrix m = sample_tridiagonal({n, alpha, 0.0}, rng);
    const EdgeTrace trace = compute_trace(m, p, {real, real});
    if (trace.flagged()) {
        err << "# note: near-singular R steps flagged; later R values come from the determinant recurrence\n";
    }
    write_output(trace_csv.string(), err, [&](std::ostream& os) { write_trace_csv(os, trace); });
    write_output(scatter_csv.string(), err, [&](std::ostream& os) { write_scatter_csv(os, trace); });
    write_output(script.string(), err,
                 [&](std::ostream& os) { os << gnuplot_script(trace_csv, scatter_csv, png, p, real); });
    return kExitOk;
}

int run_clt(const BatchConfig& cfg, unsigned threads, const std::string& out_dir, std::ostream& out,
            std::ostream& err) {
    Settings settings = {{"n_list", join(cfg.n_list)},
                         {"reps", std::to_string(cfg.reps)},
                         {"sigma_rule", cfg.sigma_rule.to_string()},
                         {"alpha", format_double(cfg.alpha)},
                         {"spike", format_double(cfg.spike)},
                         {"spike_mode", std::string(to_string(cfg.variant.spike_mode))},
                         {"scaling", std::string(to_string(cfg.variant.scaling))},
                         {"seed", std::to_string(cfg.master_seed)},
                         {"threads", std::to_string(threads)},
                         {"out", out_dir}};
    for (std::size_t n : cfg.n_list) {
        const EdgeParams p = EdgeParams::from_sigma(n, cfg.sigma_rule.sigma_for(n));
        settings.emplace_back("sigma[" + std::to_string(n) + "]", format_double(p.sigma));
        settings.emplace_back("theta[" + std::to_string(n) + "]", format_double(p.theta));
    }
    print_settings(err, "clt", settings);
    cfg.validate();

    const CampaignResult result = run_campaign(cfg, threads);
    for (const std::string& w : result.warnings) {
        err << "# warning: " << w << '\n';
    }
    std::vector<std::pair<std::size_t, SummaryStats>> rows;
    for (std::size_t n : cfg.n_list) {
        const std::vector<double> z = z_values(result, n);
        if (z.empty()) {
            err << "# warning: n=" << n << ": every replicate singular, no summary\n";
            continue;
        }
        rows.emplace_back(n, summarize(z));
    }
    const fs::path dir(out_dir);
    write_output((dir / "samples.csv").string(), out, [&](std::ostream& os) { write_samples_csv(os, result); });
    write_output((dir / "summary.csv").string(), out, [&](std::ostream& os) { write_summary_csv(os, rows); });
    write_summary_csv(out, rows);
    return kExitOk;
}

int run_prop1(const StieltjesConfig& cfg, unsigned threads, const std::string& out_dir, std::ostream& out,
              std::ostream& err) {
    const std::set<std::size_t> distinct(cfg.n_list.begin(), cfg.n_list.end());
    if (distinct.size() < 3) throw InvalidParameter("prop1 needs at least 3 distinct sizes in --n-list");
    Settings settings = {{"n_list", join(cfg.n_list)},
                         {"reps", std::to_string(cfg.reps)},
                         {"sigma", format_double(cfg.sigma)},
                         {"alpha", format_double(cfg.alpha)},
                         {"method", cfg.method == StieltjesMethod::eigen ? "eigen" : "recurrence"},
                         {"seed", std::to_string(cfg.master_seed)},
                         {"threads", std::to_string(threads)},
                         {"out", out_dir}};
    for (std::size_t n : cfg.n_list) {
        settings.emplace_back("theta[" + std::to_string(n) + "]",
                              format_double(EdgeParams::from_sigma(n, cfg.sigma).theta));
    }
    print_settings(err, "prop1", settings);

    const std::vector<StieltjesRecord> records = run_stieltjes_campaign(cfg, threads);
    const StieltjesFit fit = fit_stieltjes_exponents(records);
    const fs::path dir(out_dir);
    write_output((dir / "stieltjes.csv").string(), out, [&](std::ostream& os) {
        os << "n,rep,s1,s2\n";
        for (const StieltjesRecord& r : records) {
            os << r.n << ',' << r.rep << ',' << format_double(r.sums.s1) << ',' << format_double(r.sums.s2) << '\n';
        }
    });
    const auto write_fit = [&](std::ostream& os) {
        os << "n,median_abs_s1,median_s2\n";
        for (std::size_t k = 0; k < fit.n.size(); ++k) {
            os << fit.n[k] << ',' << format_double(fit.median_abs_s1[k]) << ',' << format_double(fit.median_s2[k])
               << '\n';
        }
    };
    write_output((dir / "fit.csv").string(), out, write_fit);
    write_fit(out);
    out << "s1_slope=" << format_double(fit.s1_slope) << "\ns2_slope=" << format_double(fit.s2_slope) << '\n';
    return kExitOk;
}

int run_decimate(std::size_t n, std::size_t reps, std::uint64_t seed, unsigned threads, double control_shift,
                 std::ostream& out, std::ostream& err) {
    print_settings(err, "decimate",
                   {{"n", std::to_string(n)}, {"reps", std::to_string(reps)}, {"seed", std::to_string(seed)},
                    {"threads", std::to_string(threads)}, {"control_shift", format_double(control_shift)}});
    const DecimationReport r = decimation_check(n, reps, seed, threads, control_shift);
    out << "n=" << r.n << "\nreps=" << r.reps << "\nidentity_ks_distance=" << format_double(r.identity.distance)
        << "\nidentity_p_value=" << format_double(r.identity.p_value)
        << "\ncontrol_shift=" << format_double(r.control_shift)
        << "\ncontrol_ks_distance=" << format_double(r.shifted_control.distance)
        << "\ncontrol_p_value=" << format_double(r.shifted_control.p_value) << '\n';
    return kExitOk;
}

}  // namespace

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Edge log-determinant laboratory for tridiagonal Gaussian beta-ensembles", "edge_logdet"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    std::string config_path;
    app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

    std::function<int()> action;
    std::uint64_t seed = 0;
    std::size_t rep = 0;
    std::size_t n = 0;
    double alpha = 1.0;
    double sigma = 0.0;
    double spike = 0.0;
    double two_theta = 2.0;
    std::size_t reps = 0;
    std::vector<std::size_t> n_list;
    std::string sigma_rule;
    std::string scaling = "thm1";
    std::string out_path;
    std::string method = "recurrence";
    unsigned threads = default_threads();
    double control_shift = 0.5;

    const auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, std::string("Master seed (default from ") + kSeedEnv + ", else 0)");
    };
    const auto add_rep = [&](CLI::App* sub) {
        sub->add_option("--rep", rep, "Replicate index of the single draw")->capture_default_str();
    };

    auto* sample = app.add_subcommand("sample", "Sample one tridiagonal matrix and write it as CSV");
    sample->add_option("--n", n, "Matrix dimension")->required();
    sample->add_option("--alpha", alpha, "Ensemble parameter (1 GUE, 2 GOE)")->capture_default_str();
    sample->add_option("--spike", spike, "Spike strength h")->capture_default_str();
    sample->add_option("--out", out_path, "Output CSV path, '-' for stdout")->required();
    add_seed(sample);
    add_rep(sample);
    sample->callback([&] { action = [&] { return run_sample(n, alpha, spike, seed, rep, out_path, out, err); }; });

    auto* logdet = app.add_subcommand("logdet", "Sign and log|det(M/sqrt(N) - 2 theta)| of one draw");
    logdet->add_option("--n", n, "Matrix dimension")->required();
    logdet->add_option("--alpha", alpha, "Ensemble parameter")->capture_default_str();
    logdet->add_option("--sigma", sigma, "Edge coordinate sigma")->capture_default_str();
    logdet->add_option("--spike", spike, "Spike strength h")->capture_default_str();
    logdet->add_option("--method", method, "recurrence or eigen")
        ->check(CLI::IsMember({"recurrence", "eigen"}))
        ->capture_default_str();
    add_seed(logdet);
    add_rep(logdet);
    logdet->callback(
        [&] { action = [&] { return run_logdet(n, alpha, sigma, spike, seed, rep, method, out, err); }; });

    auto* trace = app.add_subcommand("trace", "Write the E/R/L trace of one draw plus a gnuplot script");
    trace->add_option("--n", n, "Matrix dimension")->required();
    trace->add_option("--two-theta", two_theta, "Singularity location 2 theta")->required();
    trace->add_option("--alpha", alpha, "Ensemble parameter")->capture_default_str();
    trace->add_option("--out", out_path, "Trace CSV path")->required();
    add_seed(trace);
    add_rep(trace);
    trace->callback([&] { action = [&] { return run_trace(n, two_theta, alpha, seed, rep, out_path, err); }; });

    auto* clt = app.add_subcommand("clt", "Monte Carlo campaign of standardized log-determinants");
    clt->add_option("--n-list", n_list, "Comma-separated sizes")->required()->delimiter(',');
    clt->add_option("--reps", reps, "Replicates per size")->required();
    clt->add_option("--sigma-rule", sigma_rule, "const:C, loglog2:C or loglog3:C")->required();
    clt->add_option("--alpha", alpha, "Ensemble parameter")->capture_default_str();
    clt->add_option("--spike", spike, "Spike strength h")->capture_default_str();
    clt->add_option("--scaling", scaling, "thm1 (log N) or thm2 (theta)")
        ->check(CLI::IsMember({"thm1", "thm2"}))
        ->capture_default_str();
    clt->add_option("--out", out_path, "Output directory")->required();
    clt->add_option("--threads", threads, "Worker threads")->capture_default_str();
    add_seed(clt);
    clt->callback([&] {
        action = [&] {
            BatchConfig cfg;
            cfg.master_seed = seed;
            cfg.reps = reps;
            cfg.n_list = n_list;
            cfg.sigma_rule = SigmaRule::parse(sigma_rule);
            cfg.alpha = alpha;
            cfg.spike = spike;
            cfg.variant = {parse_scaling(scaling), classify_spike(spike)};
            return run_clt(cfg, threads, out_path, out, err);
        };
    });

    auto* prop1 = app.add_subcommand("prop1", "Stieltjes sums and their scaling exponents");
    prop1->add_option("--n-list", n_list, "Comma-separated sizes (at least 3 distinct)")->required()->delimiter(',');
    prop1->add_option("--reps", reps, "Replicates per size")->required();
    prop1->add_option("--sigma", sigma, "Edge coordinate sigma")->capture_default_str();
    prop1->add_option("--alpha", alpha, "Ensemble parameter")->capture_default_str();
    prop1->add_option("--method", method, "recurrence or eigen")
        ->check(CLI::IsMember({"recurrence", "eigen"}))
        ->capture_default_str();
    prop1->add_option("--out", out_path, "Output directory")->required();
    prop1->add_option("--threads", threads, "Worker threads")->capture_default_str();
    add_seed(prop1);
    prop1->callback([&] {
        action = [&] {
            StieltjesConfig cfg;
            cfg.master_seed = seed;
            cfg.reps = reps;
            cfg.n_list = n_list;
            cfg.sigma = sigma;
            cfg.alpha = alpha;
            cfg.method = method == "eigen" ? StieltjesMethod::eigen : StieltjesMethod::recurrence;
            return run_prop1(cfg, threads, out_path, out, err);
        };
    });

    auto* decimate = app.add_subcommand("decimate", "GOE/GOE decimation against GUE, two-sample KS");
    decimate->add_option("--n", n, "Matrix dimension (>= 2)")->required();
    decimate->add_option("--reps", reps, "Replicates")->required();
    decimate->add_option("--control-shift", control_shift, "Shift of the control sample")->capture_default_str();
    decimate->add_option("--threads", threads, "Worker threads")->capture_default_str();
    add_seed(decimate);
    decimate->callback(
        [&] { action = [&] { return run_decimate(n, reps, seed, threads, control_shift, out, err); }; });

    auto* verify = app.add_subcommand("verify", "Deterministic identity suite; exit 2 on failure");
    add_seed(verify);
    verify->callback([&] {
        action = [&] {
            print_settings(err, "verify", {{"seed", std::to_string(seed)}});
            return run_verify_suite(seed, out) == 0 ? kExitOk : kExitVerifyFailed;
        };
    });

    try {
        seed = default_seed();
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInvalidConfig;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInvalidConfig;
    }

    try {
        return action();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace edgelogdet::cli
