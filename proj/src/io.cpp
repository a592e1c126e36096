#include "schedkl/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "schedkl/errors.hpp"

namespace schedkl {

namespace {

using nlohmann::json;

double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        throw ConfigError("config: field '" + field + "' must be a number");
    }
    return v.get<double>();
}

long get_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        throw ConfigError("config: field '" + field + "' must be an integer");
    }
    return v.get<long>();
}

// Numbers may carry the string "inf" for the unbounded sentinel.
double get_number_or_inf(const json& v, const std::string& field) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf") {
            return kInfinity;
        }
        throw ConfigError("config: field '" + field + "' must be a number or \"inf\"");
    }
    return get_number(v, field);
}

json json_number_or_inf(double value) {
    if (std::isinf(value)) {
        return json("inf");
    }
    return json(value);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_strict_double(const std::string& text, const std::string& context) {
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigError(context + ": empty numeric field");
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw ConfigError(context + ": cannot parse number '" + t + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

NoiseSchedule parse_schedule(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: field 'schedule' must be an object");
    }
    if (!doc.contains("family") || !doc.at("family").is_string()) {
        throw ConfigError("config: schedule requires a string field 'family'");
    }
    const std::string family = doc.at("family").get<std::string>();
    for (const auto& item : doc.items()) {
        const std::string& key = item.key();
        if (key != "family" && key != "gamma" && key != "eta1" && key != "sigma_min" &&
            key != "sigma_max" && key != "beta0" && key != "beta1") {
            throw ConfigError("config: unknown schedule field '" + key + "'");
        }
    }
    if (family == "cosine" || family == "vp_cosine") {
        return NoiseSchedule::vp_cosine();
    }
    if (family == "flow" || family == "flow_linear") {
        return NoiseSchedule::flow_linear();
    }
    if (family == "ve" || family == "ve_geometric") {
        double sigma_min = 0.01;
        double sigma_max = 80.0;
        if (doc.contains("sigma_min")) {
            sigma_min = get_number(doc.at("sigma_min"), "schedule.sigma_min");
        }
        if (doc.contains("sigma_max")) {
            sigma_max = get_number(doc.at("sigma_max"), "schedule.sigma_max");
        }
        return NoiseSchedule::ve_geometric(sigma_min, sigma_max);
    }
    if (family == "ddpm" || family == "ddpm_linear") {
        double beta0 = 0.1;
        double beta1 = 20.0;
        if (doc.contains("beta0")) {
            beta0 = get_number(doc.at("beta0"), "schedule.beta0");
        }
        if (doc.contains("beta1")) {
            beta1 = get_number(doc.at("beta1"), "schedule.beta1");
        }
        return NoiseSchedule::ddpm_linear(beta0, beta1);
    }
    if (family == "tangent" || family == "tangent_law") {
        if (!doc.contains("gamma")) {
            throw ConfigError("config: schedule family 'tangent' requires field 'gamma'");
        }
        const double gamma = get_number(doc.at("gamma"), "schedule.gamma");
        double eta1 = kInfinity;
        if (doc.contains("eta1")) {
            eta1 = get_number_or_inf(doc.at("eta1"), "schedule.eta1");
        }
        return NoiseSchedule::tangent(gamma, eta1);
    }
    throw ConfigError("config: unknown schedule family '" + family + "'");
}

json serialize_schedule(const NoiseSchedule& schedule) {
    json doc;
    doc["family"] = schedule.name();
    switch (schedule.family()) {
        case Family::TangentLaw:
            doc["gamma"] = schedule.gamma();
            doc["eta1"] = json_number_or_inf(schedule.eta1());
            break;
        case Family::VeGeometric:
            doc["sigma_min"] = schedule.sigma_min();
            doc["sigma_max"] = schedule.sigma_max();
            break;
        case Family::DdpmLinear:
            doc["beta0"] = schedule.beta0();
            doc["beta1"] = schedule.beta1();
            break;
        default:
            break;
    }
    return doc;
}

std::string spectrum_to_csv(const Spectrum& spectrum) {
    std::ostringstream out;
    out << "mu\n";
    for (double m : spectrum.mu) {
        out << format_double(m) << "\n";
    }
    return out.str();
}

Spectrum spectrum_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    std::vector<double> mu;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        if (!saw_header) {
            if (t != "mu") {
                throw ConfigError("spectrum csv: expected header 'mu', got '" + t + "'");
            }
            saw_header = true;
            continue;
        }
        mu.push_back(parse_strict_double(t, "spectrum csv"));
    }
    if (!saw_header) {
        throw ConfigError("spectrum csv: missing header 'mu'");
    }
    return make_spectrum(std::move(mu));
}

json kl_report_to_json(const KlReport& report) {
    json doc;
    doc["m"] = report.m;
    doc["n"] = report.n;
    doc["kl"] = json_number_or_inf(report.kl_total);
    return doc;
}

std::string kl_report_to_csv(const KlReport& report) {
    std::ostringstream out;
    out << "# schedkl kl-report v1\n";
    out << "row,m,n,log_ratio,kl\n";
    for (std::size_t l = 0; l < report.m.size(); ++l) {
        out << l << ',' << format_double(report.m[l]) << ',' << format_double(report.n[l])
            << ',' << format_double(report.log_ratio[l]) << ",\n";
    }
    out << "total,,,," << format_double(report.kl_total) << "\n";
    return out.str();
}

json asymptotic_report_to_json(const AsymptoticReport& report) {
    json doc;
    doc["I"] = report.I;
    doc["E1"] = report.E1;
    return doc;
}

std::string asymptotic_report_to_csv(const AsymptoticReport& report) {
    std::ostringstream out;
    out << "# schedkl asymptotics v1\n";
    out << "mode,I,E1\n";
    for (std::size_t l = 0; l < report.I.size(); ++l) {
        out << l << ',' << format_double(report.I[l]) << ',' << format_double(report.E1[l])
            << "\n";
    }
    return out.str();
}

std::string step_table_to_json(const StepTable& table) {
    json doc;
    json sched;
    sched["family"] = table.family;
    for (const auto& [key, value] : table.params) {
        sched[key] = json_number_or_inf(value);
    }
    doc["schedule"] = sched;
    doc["rho"] = table.rho;
    doc["nfe"] = table.nfe;
    doc["timesteps"] = table.timesteps;
    doc["lambdas"] = table.lambdas;
    doc["generator"] = "power-uniform";
    doc["version"] = 1;
    return doc.dump(2) + "\n";
}

StepTable step_table_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("step table: ") + err.what());
    }
    if (!doc.is_object() || !doc.contains("version") || !doc.contains("timesteps") ||
        !doc.contains("lambdas") || !doc.contains("schedule")) {
        throw ConfigError("step table: missing required fields");
    }
    if (get_integer(doc.at("version"), "version") != 1) {
        throw ConfigError("step table: unsupported version");
    }
    if (doc.contains("generator") &&
        doc.at("generator").get<std::string>() != "power-uniform") {
        throw ConfigError("step table: unknown generator");
    }
    StepTable table;
    table.family = doc.at("schedule").at("family").get<std::string>();
    for (const auto& item : doc.at("schedule").items()) {
        if (item.key() != "family") {
            table.params.emplace_back(item.key(),
                                      get_number_or_inf(item.value(), item.key()));
        }
    }
    table.rho = get_number(doc.at("rho"), "rho");
    table.nfe = static_cast<int>(get_integer(doc.at("nfe"), "nfe"));
    table.timesteps = doc.at("timesteps").get<std::vector<double>>();
    table.lambdas = doc.at("lambdas").get<std::vector<double>>();
    if (table.timesteps.size() != table.lambdas.size() ||
        table.timesteps.size() != static_cast<std::size_t>(table.nfe) + 1) {
        throw ConfigError("step table: inconsistent sequence lengths");
    }
    for (std::size_t i = 1; i < table.timesteps.size(); ++i) {
        if (!(table.timesteps[i] < table.timesteps[i - 1])) {
            throw ConfigError("step table: timesteps must be strictly decreasing");
        }
        if (!(table.lambdas[i] > table.lambdas[i - 1])) {
            throw ConfigError("step table: lambdas must be strictly increasing");
        }
    }
    return table;
}

std::string step_table_to_csv(const StepTable& table) {
    std::ostringstream out;
    out << "# schedkl steps v1\n";
    out << "i,t,lambda\n";
    for (std::size_t i = 0; i < table.timesteps.size(); ++i) {
        out << i << ',' << format_double(table.timesteps[i]) << ','
            << format_double(table.lambdas[i]) << "\n";
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path + ": cannot open for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(path + ": cannot open for writing");
    }
    out << bytes;
    if (!out) {
        throw std::runtime_error(path + ": write failed");
    }
}

double ExperimentConfig::resolved_lambda_lo() const {
    if (!std::isnan(lambda_lo)) {
        return lambda_lo;
    }
    return schedule.half_logsnr(schedule.default_t_hi());
}

double ExperimentConfig::resolved_lambda_hi() const {
    if (!std::isnan(lambda_hi)) {
        return lambda_hi;
    }
    return schedule.half_logsnr(schedule.default_t_lo());
}

ExperimentConfig parse_experiment_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be a JSON object");
    }
    ExperimentConfig cfg;
    for (const auto& item : doc.items()) {
        const std::string& key = item.key();
        const json& value = item.value();
        if (key == "schedule") {
            cfg.schedule = parse_schedule(value);
        } else if (key == "spectrum") {
            if (!value.is_object()) {
                throw ConfigError("config: field 'spectrum' must be an object");
            }
            if (value.contains("csv")) {
                if (value.size() != 1) {
                    throw ConfigError("config: spectrum 'csv' cannot be combined with "
                                      "power-law fields");
                }
                cfg.spectrum = spectrum_from_csv(read_file(value.at("csv").get<std::string>()));
            } else {
                PowerLawParams params;
                for (const auto& f : value.items()) {
                    if (f.key() == "k") {
                        params.k = static_cast<int>(get_integer(f.value(), "spectrum.k"));
                    } else if (f.key() == "p") {
                        params.p = get_number(f.value(), "spectrum.p");
                    } else if (f.key() == "i0") {
                        params.i0 = get_number(f.value(), "spectrum.i0");
                    } else if (f.key() == "mu_max") {
                        params.mu_max = get_number(f.value(), "spectrum.mu_max");
                    } else if (f.key() == "mu_min") {
                        params.mu_min = get_number(f.value(), "spectrum.mu_min");
                    } else {
                        throw ConfigError("config: unknown spectrum field '" + f.key() + "'");
                    }
                }
                try {
                    cfg.spectrum = power_law_spectrum(params);
                } catch (const std::invalid_argument& err) {
                    throw ConfigError(std::string("config: spectrum: ") + err.what());
                }
            }
        } else if (key == "N") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config: field 'N' must be a non-empty array");
            }
            cfg.n_list.clear();
            for (const json& n : value) {
                const long v = get_integer(n, "N");
                if (v < 1) {
                    throw ConfigError("config: field 'N' entries must be >= 1");
                }
                cfg.n_list.push_back(v);
            }
        } else if (key == "rho") {
            if (!value.is_array() || value.empty()) {
                throw ConfigError("config: field 'rho' must be a non-empty array");
            }
            cfg.rho_list.clear();
            for (const json& r : value) {
                const double v = get_number(r, "rho");
                if (!(v >= 1.0)) {
                    throw ConfigError("config: field 'rho' entries must be >= 1");
                }
                cfg.rho_list.push_back(v);
            }
        } else if (key == "gamma") {
            if (value.is_string() && value.get<std::string>() == "auto") {
                cfg.gamma_list.clear();
            } else if (value.is_array() && !value.empty()) {
                cfg.gamma_list.clear();
                for (const json& g : value) {
                    const double v = get_number(g, "gamma");
                    if (!(v > 0.0)) {
                        throw ConfigError("config: field 'gamma' entries must be positive");
                    }
                    cfg.gamma_list.push_back(v);
                }
            } else {
                throw ConfigError("config: field 'gamma' must be \"auto\" or a non-empty array");
            }
        } else if (key == "gamma_points") {
            cfg.gamma_points = static_cast<int>(get_integer(value, "gamma_points"));
            if (cfg.gamma_points < 3) {
                throw ConfigError("config: field 'gamma_points' must be >= 3");
            }
        } else if (key == "out") {
            cfg.out = value.get<std::string>();
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(get_integer(value, "seed"));
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(get_integer(value, "threads"));
            if (cfg.threads < 1) {
                throw ConfigError("config: field 'threads' must be >= 1");
            }
        } else if (key == "lambda_lo") {
            cfg.lambda_lo = get_number(value, "lambda_lo");
        } else if (key == "lambda_hi") {
            cfg.lambda_hi = get_number(value, "lambda_hi");
        } else if (key == "mc_samples") {
            cfg.mc_samples = get_integer(value, "mc_samples");
            if (cfg.mc_samples < 1000) {
                throw ConfigError("config: field 'mc_samples' must be >= 1000");
            }
        } else if (key == "mc_batch") {
            cfg.mc_batch = static_cast<int>(get_integer(value, "mc_batch"));
            if (cfg.mc_batch < 1) {
                throw ConfigError("config: field 'mc_batch' must be >= 1");
            }
        } else if (key == "series") {
            const std::string s = value.get<std::string>();
            if (s != "exact" && s != "predicted") {
                throw ConfigError("config: field 'series' must be 'exact' or 'predicted'");
            }
            cfg.series = s;
        } else {
            throw ConfigError("config: unknown field '" + key + "'");
        }
    }
    if (!std::isnan(cfg.lambda_lo) && !std::isnan(cfg.lambda_hi) &&
        !(cfg.lambda_lo < cfg.lambda_hi)) {
        throw ConfigError("config: need lambda_lo < lambda_hi");
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& err) {
        throw ConfigError("config: " + path + ": " + err.what());
    }
    return parse_experiment_config(doc);
}

}  // namespace schedkl
