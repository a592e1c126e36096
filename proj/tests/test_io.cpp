#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "schedkl/discretize.hpp"
#include "schedkl/errors.hpp"
#include "schedkl/io.hpp"
#include "schedkl/kl.hpp"
#include "schedkl/schedule.hpp"
#include "schedkl/spectrum.hpp"
#include "schedkl/time_grid.hpp"

using namespace schedkl;
using nlohmann::json;

TEST_CASE("format_double round-trips through strtod") {
    const std::vector<double> values = {0.0,    -0.0,   0.1,   1.0 / 3.0, -2.5,
                                        1e-300, 8.7e300, 42.0, 5e-324};
    for (double v : values) {
        const std::string s = format_double(v);
        char* end = nullptr;
        const double back = std::strtod(s.c_str(), &end);
        CHECK(end == s.c_str() + s.size());
        CHECK(back == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("parse_schedule families and aliases") {
    CHECK(parse_schedule(json{{"family", "cosine"}}).name() == "cosine");
    CHECK(parse_schedule(json{{"family", "vp_cosine"}}).name() == "cosine");
    CHECK(parse_schedule(json{{"family", "flow_linear"}}).name() == "flow");

    const NoiseSchedule ve =
        parse_schedule(json{{"family", "ve"}, {"sigma_min", 0.02}, {"sigma_max", 40.0}});
    CHECK(ve.sigma_min() == 0.02);
    CHECK(ve.sigma_max() == 40.0);

    const NoiseSchedule tan_inf =
        parse_schedule(json{{"family", "tangent"}, {"gamma", 2.0}});
    CHECK(tan_inf.gamma() == 2.0);
    CHECK(std::isinf(tan_inf.eta1()));

    const NoiseSchedule tan_str =
        parse_schedule(json{{"family", "tangent"}, {"gamma", 2.0}, {"eta1", "inf"}});
    CHECK(std::isinf(tan_str.eta1()));

    const NoiseSchedule tan_fin =
        parse_schedule(json{{"family", "tangent_law"}, {"gamma", 0.5}, {"eta1", 80.0}});
    CHECK(tan_fin.eta1() == 80.0);

    const NoiseSchedule ddpm =
        parse_schedule(json{{"family", "ddpm"}, {"beta0", 0.2}, {"beta1", 10.0}});
    CHECK(ddpm.beta0() == 0.2);
    CHECK(ddpm.beta1() == 10.0);
}

TEST_CASE("parse_schedule error paths") {
    CHECK_THROWS_AS(parse_schedule(json::array()), ConfigError);
    CHECK_THROWS_AS(parse_schedule(json{{"gamma", 1.0}}), ConfigError);
    CHECK_THROWS_AS(parse_schedule(json{{"family", "unknown"}}), ConfigError);
    CHECK_THROWS_AS(parse_schedule(json{{"family", "tangent"}}), ConfigError);
    CHECK_THROWS_AS(parse_schedule(json{{"family", "cosine"}, {"zeta", 1.0}}),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_schedule(json{{"family", "tangent"}, {"gamma", 1.0}, {"eta1", "huge"}}),
        ConfigError);
}

TEST_CASE("schedule serialization round-trips") {
    const std::vector<NoiseSchedule> families = {
        NoiseSchedule::vp_cosine(),
        NoiseSchedule::ve_geometric(0.02, 40.0),
        NoiseSchedule::tangent(2.0),
        NoiseSchedule::tangent(0.7, 80.0),
        NoiseSchedule::ddpm_linear(0.2, 10.0),
        NoiseSchedule::flow_linear()};
    for (const NoiseSchedule& schedule : families) {
        const NoiseSchedule back = parse_schedule(serialize_schedule(schedule));
        CHECK(back.name() == schedule.name());
        CHECK(back.gamma() == schedule.gamma());
        CHECK(back.eta1() == schedule.eta1());
        CHECK(back.sigma_min() == schedule.sigma_min());
        CHECK(back.sigma_max() == schedule.sigma_max());
        CHECK(back.beta0() == schedule.beta0());
        CHECK(back.beta1() == schedule.beta1());
    }
    const json tan = serialize_schedule(NoiseSchedule::tangent(2.0));
    CHECK(tan.at("eta1").get<std::string>() == "inf");
}

TEST_CASE("spectrum CSV round-trip and validation") {
    const Spectrum spectrum = power_law_spectrum(PowerLawParams{5, 1.5, 3.0, 5.0, 1e-3});
    const std::string csv = spectrum_to_csv(spectrum);
    CHECK(csv.rfind("mu\n", 0) == 0);
    const Spectrum back = spectrum_from_csv(csv);
    REQUIRE(back.size() == spectrum.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back.mu[i] == spectrum.mu[i]);
    }

    // Comments and blank lines are tolerated.
    const Spectrum commented = spectrum_from_csv("# note\n\nmu\n2.0\n\n1.0\n");
    REQUIRE(commented.size() == 2);
    CHECK(commented.mu[0] == 2.0);

    CHECK_THROWS_AS(spectrum_from_csv("eigen\n1.0\n"), ConfigError);
    CHECK_THROWS_AS(spectrum_from_csv(""), ConfigError);
    CHECK_THROWS_AS(spectrum_from_csv("mu\nabc\n"), ConfigError);

    try {
        spectrum_from_csv("mu\n2.0\n-1.0\n");
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mode 1") != std::string::npos);
    }
}

TEST_CASE("kl report serialization") {
    const KlReport report = compute_kl_report(NoiseSchedule::vp_cosine(), uniform_grid(8),
                                              make_spectrum({2.0, 0.5}));
    const json doc = kl_report_to_json(report);
    REQUIRE(doc.contains("m"));
    REQUIRE(doc.contains("n"));
    REQUIRE(doc.contains("kl"));
    CHECK(doc.at("m").size() == 2);
    CHECK(doc.at("kl").get<double>() == report.kl_total);

    const std::string csv = kl_report_to_csv(report);
    CHECK(csv.rfind("# schedkl kl-report v1\n", 0) == 0);
    CHECK(csv.find("row,m,n,log_ratio,kl\n") != std::string::npos);
    CHECK(csv.find("total,,,," + format_double(report.kl_total)) != std::string::npos);

    // Degenerate reports carry the inf sentinel.
    const KlReport deg = compute_kl_report(NoiseSchedule::vp_cosine(),
                                           make_time_grid({0.0, 1.0}), make_spectrum({1.0}));
    const json deg_doc = kl_report_to_json(deg);
    CHECK(deg_doc.at("kl").get<std::string>() == "inf");
    CHECK(kl_report_to_csv(deg).find("-inf") != std::string::npos);
}

TEST_CASE("asymptotic report serialization") {
    const AsymptoticReport report = make_asymptotic_report(
        NoiseSchedule::vp_cosine(), make_spectrum({2.0, 0.5}));
    const json doc = asymptotic_report_to_json(report);
    REQUIRE(doc.contains("I"));
    REQUIRE(doc.contains("E1"));
    CHECK(doc.at("I").size() == 2);
    CHECK(doc.at("E1").at(0).get<double>() == report.E1[0]);

    const std::string csv = asymptotic_report_to_csv(report);
    CHECK(csv.rfind("# schedkl asymptotics v1\n", 0) == 0);
    CHECK(csv.find("mode,I,E1\n") != std::string::npos);
}

TEST_CASE("step table JSON round-trip") {
    const NoiseSchedule tangent = NoiseSchedule::tangent(2.0, 80.0);
    const LambdaSequence seq =
        power_uniform(tangent.half_logsnr(0.05), tangent.half_logsnr(0.95), 12, 2.0);
    const TimeGrid grid = grid_from_lambdas(tangent, seq);
    const StepTable table = make_step_table(tangent, grid, seq);

    const std::string text = step_table_to_json(table);
    const StepTable back = step_table_from_json(text);
    CHECK(back.family == "tangent");
    CHECK(back.nfe == 12);
    CHECK(back.rho == 2.0);
    REQUIRE(back.timesteps.size() == table.timesteps.size());
    for (std::size_t i = 0; i < table.timesteps.size(); ++i) {
        CHECK(back.timesteps[i] == table.timesteps[i]);
        CHECK(back.lambdas[i] == table.lambdas[i]);
    }
    // Re-serialization is byte-identical (sorted keys, canonical numbers).
    CHECK(step_table_to_json(back) == text);

    const json doc = json::parse(text);
    CHECK(doc.at("generator").get<std::string>() == "power-uniform");
    CHECK(doc.at("version").get<int>() == 1);

    const std::string csv = step_table_to_csv(table);
    CHECK(csv.rfind("# schedkl steps v1\n", 0) == 0);
    CHECK(csv.find("i,t,lambda\n") != std::string::npos);
}

TEST_CASE("step table import validation") {
    const NoiseSchedule cosine = NoiseSchedule::vp_cosine();
    const LambdaSequence seq = power_uniform(2.0, -2.0, 4, 1.0);
    const StepTable table =
        make_step_table(cosine, grid_from_lambdas(cosine, seq), seq);
    const std::string text = step_table_to_json(table);

    CHECK_THROWS_AS(step_table_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(step_table_from_json("{}"), ConfigError);

    json doc = json::parse(text);
    doc["version"] = 2;
    CHECK_THROWS_AS(step_table_from_json(doc.dump()), ConfigError);

    doc = json::parse(text);
    doc["generator"] = "other";
    CHECK_THROWS_AS(step_table_from_json(doc.dump()), ConfigError);

    doc = json::parse(text);
    doc["nfe"] = 7;
    CHECK_THROWS_AS(step_table_from_json(doc.dump()), ConfigError);

    doc = json::parse(text);
    std::swap(doc["timesteps"][0], doc["timesteps"][1]);
    CHECK_THROWS_AS(step_table_from_json(doc.dump()), ConfigError);

    doc = json::parse(text);
    std::swap(doc["lambdas"][0], doc["lambdas"][1]);
    CHECK_THROWS_AS(step_table_from_json(doc.dump()), ConfigError);
}

TEST_CASE("file helpers report the path") {
    const std::string path = "/tmp/schedkl_io_test.txt";
    write_file(path, "payload\n");
    CHECK(read_file(path) == "payload\n");
    std::remove(path.c_str());

    try {
        read_file("/nonexistent/dir/file.json");
        FAIL("expected runtime_error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/file.json") !=
              std::string::npos);
    }
    CHECK_THROWS_AS(write_file("/nonexistent/dir/file.json", "x"), std::runtime_error);
}

TEST_CASE("experiment config defaults") {
    const ExperimentConfig cfg = parse_experiment_config(json::object());
    CHECK(cfg.schedule.name() == "cosine");
    CHECK(cfg.spectrum.size() == 128);
    CHECK(cfg.n_list == std::vector<long>{4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128});
    CHECK(cfg.rho_list == std::vector<double>{1.0, 1.5, 2.0});
    CHECK(cfg.gamma_list.empty());
    CHECK(cfg.gamma_points == 25);
    CHECK(cfg.out.empty());
    CHECK(cfg.seed == 42u);
    CHECK(cfg.threads == 1);
    CHECK(cfg.mc_samples == 200000);
    CHECK(cfg.mc_batch == 4096);
    CHECK(cfg.series == "exact");
    CHECK(std::isnan(cfg.lambda_lo));
    CHECK(std::isnan(cfg.lambda_hi));
    // Default lambda boundaries come from the schedule's default time span.
    CHECK(cfg.resolved_lambda_lo() ==
          cfg.schedule.half_logsnr(cfg.schedule.default_t_hi()));
    CHECK(cfg.resolved_lambda_hi() ==
          cfg.schedule.half_logsnr(cfg.schedule.default_t_lo()));
}

TEST_CASE("experiment config full document") {
    const json doc = {
        {"schedule", {{"family", "tangent"}, {"gamma", 0.5}, {"eta1", 80.0}}},
        {"spectrum", {{"k", 16}, {"p", 1.0}, {"i0", 2.0}, {"mu_max", 4.0}, {"mu_min", 0.0}}},
        {"N", {3, 5, 9}},
        {"rho", {1.0, 2.0}},
        {"gamma", {0.5, 1.5}},
        {"gamma_points", 7},
        {"out", "/tmp/somewhere"},
        {"seed", 7},
        {"threads", 2},
        {"lambda_lo", -3.0},
        {"lambda_hi", 3.0},
        {"mc_samples", 5000},
        {"mc_batch", 256},
        {"series", "predicted"},
    };
    const ExperimentConfig cfg = parse_experiment_config(doc);
    CHECK(cfg.schedule.name() == "tangent");
    CHECK(cfg.schedule.gamma() == 0.5);
    CHECK(cfg.spectrum.size() == 16);
    CHECK(cfg.spectrum.mu[0] == 4.0);
    CHECK(cfg.n_list == std::vector<long>{3, 5, 9});
    CHECK(cfg.rho_list == std::vector<double>{1.0, 2.0});
    CHECK(cfg.gamma_list == std::vector<double>{0.5, 1.5});
    CHECK(cfg.gamma_points == 7);
    CHECK(cfg.out == "/tmp/somewhere");
    CHECK(cfg.seed == 7u);
    CHECK(cfg.threads == 2);
    CHECK(cfg.resolved_lambda_lo() == -3.0);
    CHECK(cfg.resolved_lambda_hi() == 3.0);
    CHECK(cfg.mc_samples == 5000);
    CHECK(cfg.mc_batch == 256);
    CHECK(cfg.series == "predicted");

    // "auto" resets the gamma list to the derived grid marker.
    const ExperimentConfig auto_cfg =
        parse_experiment_config(json{{"gamma", "auto"}});
    CHECK(auto_cfg.gamma_list.empty());
}

TEST_CASE("experiment config error paths") {
    CHECK_THROWS_AS(parse_experiment_config(json::array()), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"mystery", 1}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"N", json::array()}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"N", {0}}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"rho", {0.5}}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"gamma", {-1.0}}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"gamma", "none"}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"gamma_points", 2}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"threads", 0}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"mc_samples", 10}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"mc_batch", 0}}), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(json{{"series", "other"}}), ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(json{{"lambda_lo", 2.0}, {"lambda_hi", -2.0}}),
        ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(json{{"spectrum", {{"mystery", 1.0}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(json{{"spectrum", {{"k", 0}}}}),
        ConfigError);

    try {
        parse_experiment_config(json{{"series", "other"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("series") != std::string::npos);
    }

    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"),
                    std::runtime_error);
}
