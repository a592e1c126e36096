#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "schedkl/errors.hpp"
#include "schedkl/experiments.hpp"
#include "schedkl/io.hpp"

namespace {

using schedkl::ConfigError;
using schedkl::ExperimentConfig;

// Every flag below overrides the matching config-file field; unset flags
// leave the config (or its defaults) untouched.
struct CliOptions {
    std::string config_path;
    std::string out;
    std::optional<std::string> family;
    std::optional<double> gamma;
    std::optional<std::string> eta1;
    std::optional<double> sigma_min, sigma_max, beta0, beta1;
    std::optional<std::string> spectrum_csv;
    std::optional<int> k;
    std::optional<double> p, i0, mu_max, mu_min;
    std::vector<long> n_list;
    std::vector<double> rho_list;
    std::vector<double> gamma_grid;
    std::optional<int> gamma_points;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> lambda_lo, lambda_hi;
    std::optional<long> mc_samples;
    std::optional<int> mc_batch;
    std::optional<std::string> series;
};

void add_common_options(CLI::App* sub, CliOptions* opts) {
    sub->add_option("--config", opts->config_path, "JSON experiment config file");
    sub->add_option("--out", opts->out, "Output path (default: stdout)");
    sub->add_option("--schedule", opts->family,
                    "Schedule family: cosine, ve, tangent, ddpm, flow");
    sub->add_option("--gamma", opts->gamma, "Tangent-law coefficient (> 0)");
    sub->add_option("--eta1", opts->eta1,
                    "Tangent-law terminal noise-to-signal ratio (number or 'inf')");
    sub->add_option("--sigma-min", opts->sigma_min, "VE minimum sigma");
    sub->add_option("--sigma-max", opts->sigma_max, "VE maximum sigma");
    sub->add_option("--beta0", opts->beta0, "DDPM beta at t=0");
    sub->add_option("--beta1", opts->beta1, "DDPM beta at t=1");
    sub->add_option("--spectrum", opts->spectrum_csv,
                    "Spectrum CSV file (one 'mu' column, descending)");
    sub->add_option("--k", opts->k, "Power-law spectrum: number of modes");
    sub->add_option("--p", opts->p, "Power-law spectrum: decay exponent");
    sub->add_option("--i0", opts->i0, "Power-law spectrum: index offset");
    sub->add_option("--mu-max", opts->mu_max, "Power-law spectrum: largest eigenvalue");
    sub->add_option("--mu-min", opts->mu_min, "Power-law spectrum: additive floor");
    sub->add_option("--N", opts->n_list, "Step counts, comma separated")->delimiter(',');
    sub->add_option("--rho", opts->rho_list, "Companding exponents, comma separated")
        ->delimiter(',');
    sub->add_option("--gamma-grid", opts->gamma_grid,
                    "Explicit gamma values for the sweep, comma separated")
        ->delimiter(',');
    sub->add_option("--gamma-points", opts->gamma_points,
                    "Auto gamma-grid size (odd keeps the optimum centered)");
    sub->add_option("--seed", opts->seed, "RNG seed for randomized checks");
    sub->add_option("--threads", opts->threads, "Worker threads for Monte Carlo");
    sub->add_option("--lambda-lo", opts->lambda_lo,
                    "Half-logSNR at the sampling start (default: schedule range)");
    sub->add_option("--lambda-hi", opts->lambda_hi,
                    "Half-logSNR at the sampling end (default: schedule range)");
    sub->add_option("--mc-samples", opts->mc_samples, "Monte Carlo sample count");
    sub->add_option("--mc-batch", opts->mc_batch, "Monte Carlo batch size");
    sub->add_option("--series", opts->series, "rate-fit input series: exact | predicted");
}

double parse_eta1(const std::string& text) {
    if (text == "inf" || text == "Inf" || text == "INF") return schedkl::kInfinity;
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size()) throw ConfigError("eta1: trailing characters in '" + text + "'");
        return value;
    } catch (const std::invalid_argument&) {
        throw ConfigError("eta1: expected a number or 'inf', got '" + text + "'");
    }
}

ExperimentConfig build_config(const CliOptions& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty())
        cfg = schedkl::load_experiment_config(opts.config_path);

    const bool schedule_touched = opts.family || opts.gamma || opts.eta1 ||
                                  opts.sigma_min || opts.sigma_max || opts.beta0 ||
                                  opts.beta1;
    if (schedule_touched) {
        nlohmann::json doc = schedkl::serialize_schedule(cfg.schedule);
        if (opts.family && *opts.family != doc["family"].get<std::string>())
            doc = nlohmann::json{{"family", *opts.family}};
        if (opts.gamma) doc["gamma"] = *opts.gamma;
        if (opts.eta1) doc["eta1"] = parse_eta1(*opts.eta1);
        if (opts.sigma_min) doc["sigma_min"] = *opts.sigma_min;
        if (opts.sigma_max) doc["sigma_max"] = *opts.sigma_max;
        if (opts.beta0) doc["beta0"] = *opts.beta0;
        if (opts.beta1) doc["beta1"] = *opts.beta1;
        cfg.schedule = schedkl::parse_schedule(doc);
    }

    if (opts.spectrum_csv) {
        cfg.spectrum = schedkl::spectrum_from_csv(schedkl::read_file(*opts.spectrum_csv));
    } else if (opts.k || opts.p || opts.i0 || opts.mu_max || opts.mu_min) {
        schedkl::PowerLawParams params;
        if (opts.k) params.k = *opts.k;
        if (opts.p) params.p = *opts.p;
        if (opts.i0) params.i0 = *opts.i0;
        if (opts.mu_max) params.mu_max = *opts.mu_max;
        if (opts.mu_min) params.mu_min = *opts.mu_min;
        cfg.spectrum = schedkl::power_law_spectrum(params);
    }

    if (!opts.n_list.empty()) cfg.n_list = opts.n_list;
    if (!opts.rho_list.empty()) cfg.rho_list = opts.rho_list;
    if (!opts.gamma_grid.empty()) cfg.gamma_list = opts.gamma_grid;
    if (opts.gamma_points) {
        if (*opts.gamma_points < 3) throw ConfigError("gamma-points: need at least 3");
        cfg.gamma_points = *opts.gamma_points;
    }
    if (!opts.out.empty()) cfg.out = opts.out;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.threads) {
        if (*opts.threads < 1) throw ConfigError("threads: need at least 1");
        cfg.threads = *opts.threads;
    }
    if (opts.lambda_lo) cfg.lambda_lo = *opts.lambda_lo;
    if (opts.lambda_hi) cfg.lambda_hi = *opts.lambda_hi;
    if (opts.mc_samples) {
        if (*opts.mc_samples < 1000) throw ConfigError("mc-samples: need at least 1000");
        cfg.mc_samples = *opts.mc_samples;
    }
    if (opts.mc_batch) {
        if (*opts.mc_batch < 1) throw ConfigError("mc-batch: need at least 1");
        cfg.mc_batch = *opts.mc_batch;
    }
    if (opts.series) cfg.series = *opts.series;
    return cfg;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    const std::filesystem::path path(out_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    schedkl::write_file(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form KL analysis of Gaussian reverse-diffusion sampling: "
                 "exact per-mode divergences, second-order rate predictions, "
                 "variationally optimal schedules, and sampler step tables."};
    app.set_version_flag("--version", "schedkl 1.0.0");
    app.require_subcommand(1);
    CliOptions opts;

    CLI::App* scan = app.add_subcommand(
        "kl-scan", "Exact KL and its leading-order prediction on power-uniform "
                   "lambda grids, per (rho, N)");
    CLI::App* compare = app.add_subcommand(
        "schedule-compare", "KL across schedule families on uniform time grids, "
                            "tangent law at the optimal gamma");
    CLI::App* sweep = app.add_subcommand(
        "gamma-sweep", "Tangent-law KL across a gamma grid with the closed-form "
                       "optimum marked");
    CLI::App* rate = app.add_subcommand(
        "rate-fit", "Log-log slope of KL against N over a doubling ladder");
    CLI::App* steps = app.add_subcommand(
        "steps-export", "Write sampler-ready step tables, one JSON file per (rho, N)");
    CLI::App* verify = app.add_subcommand(
        "verify", "Run the full oracle battery and emit a JSON report");
    for (CLI::App* sub : {scan, compare, sweep, rate, steps, verify})
        add_common_options(sub, &opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg = build_config(opts);
        if (scan->parsed()) {
            emit(cfg.out, schedkl::kl_scan_to_csv(schedkl::run_kl_scan(cfg)));
        } else if (compare->parsed()) {
            emit(cfg.out, schedkl::schedule_compare_to_csv(schedkl::run_schedule_compare(cfg)));
        } else if (sweep->parsed()) {
            emit(cfg.out, schedkl::gamma_sweep_to_csv(schedkl::run_gamma_sweep(cfg)));
        } else if (rate->parsed()) {
            emit(cfg.out, schedkl::rate_fit_to_json(schedkl::run_rate_fit(cfg)));
        } else if (steps->parsed()) {
            if (cfg.out.empty())
                throw ConfigError("steps-export: --out directory is required");
            std::filesystem::create_directories(cfg.out);
            for (const schedkl::ExportedFile& file : schedkl::run_steps_export(cfg)) {
                schedkl::write_file(cfg.out + "/" + file.name, file.bytes);
                std::printf("%s\n", file.name.c_str());
            }
        } else if (verify->parsed()) {
            const schedkl::VerifyReport report = schedkl::run_verify(cfg);
            for (const schedkl::CheckResult& check : report.checks)
                std::fprintf(stderr, "%-16s %s\n", check.name.c_str(),
                             check.pass ? "pass" : "FAIL");
            emit(cfg.out, schedkl::verify_report_to_json(report));
            if (!report.all_pass) {
                std::fprintf(stderr, "verification failed\n");
                return 3;
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "schedkl: error: %s\n", e.what());
        return 2;
    }
    return 0;
}
