#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "schedkl/asymptotics.hpp"
#include "schedkl/discretize.hpp"
#include "schedkl/kl.hpp"
#include "schedkl/schedule.hpp"
#include "schedkl/spectrum.hpp"

namespace schedkl {

// All emitted bytes are deterministic: JSON keys are sorted, doubles render
// either as shortest-round-trip (JSON) or 17-significant-digit (CSV) forms,
// and infinities appear as the string "inf".

// %.17g rendering; round-trips through strtod.
std::string format_double(double value);

// Schedule descriptor, e.g. {"family":"tangent","gamma":2.0,"eta1":"inf"}.
// Accepted family names: cosine, ve, tangent, ddpm, flow (plus the long
// aliases vp_cosine, ve_geometric, tangent_law, ddpm_linear, flow_linear).
NoiseSchedule parse_schedule(const nlohmann::json& doc);
nlohmann::json serialize_schedule(const NoiseSchedule& schedule);

// One-column CSV with header "mu".
std::string spectrum_to_csv(const Spectrum& spectrum);
Spectrum spectrum_from_csv(const std::string& text);

nlohmann::json kl_report_to_json(const KlReport& report);
std::string kl_report_to_csv(const KlReport& report);

nlohmann::json asymptotic_report_to_json(const AsymptoticReport& report);
std::string asymptotic_report_to_csv(const AsymptoticReport& report);

// Step-table document for external sampler pipelines.
std::string step_table_to_json(const StepTable& table);
StepTable step_table_from_json(const std::string& text);
std::string step_table_to_csv(const StepTable& table);

// File helpers with path context on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// Experiment driver configuration; a single JSON document, every field
// overridable by a CLI flag of the same name.
struct ExperimentConfig {
    NoiseSchedule schedule = NoiseSchedule::vp_cosine();
    Spectrum spectrum = power_law_spectrum(PowerLawParams{});
    std::vector<long> n_list = {4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128};
    std::vector<double> rho_list = {1.0, 1.5, 2.0};
    std::vector<double> gamma_list;  // empty: auto log-grid around gamma_star
    int gamma_points = 25;
    std::string out;  // empty: stdout
    std::uint64_t seed = 42;
    int threads = 1;
    // Lambda boundaries for grid construction; NaN means schedule defaults
    // (the lambda range attained on [default_t_lo, default_t_hi]).
    double lambda_lo = std::numeric_limits<double>::quiet_NaN();
    double lambda_hi = std::numeric_limits<double>::quiet_NaN();
    long mc_samples = 200000;
    int mc_batch = 4096;
    std::string series = "exact";  // rate-fit input series: exact | predicted

    double resolved_lambda_lo() const;
    double resolved_lambda_hi() const;
};

// Throws ConfigError naming the offending field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace schedkl
