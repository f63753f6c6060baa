#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlcalib/functionals.hpp"
#include "nlcalib/io.hpp"
#include "nlcalib/oracle.hpp"
#include "nlcalib/scenario.hpp"

namespace {

using nlcalib::BuiltScenario;
using nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOptions& options, bool with_workers) {
    cmd->add_option("--config", options.config_path, "scenario config file (JSON)")
        ->required();
    cmd->add_option("--out", options.out_path, "write the report here instead of stdout");
    cmd->add_option("--format", options.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    if (with_workers)
        cmd->add_option("--workers", options.workers, "enumeration worker threads")
            ->check(CLI::PositiveNumber);
}

void emit(const CommonOptions& options, const std::string& text) {
    if (options.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(options.out_path);
    if (!out) throw std::invalid_argument("cannot write '" + options.out_path + "'");
    out << text;
}

std::string render(const ordered_json& report) { return report.dump(2) + "\n"; }

nlohmann::json raw_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    return j;
}

nlcalib::OracleOptions oracle_options(const nlohmann::json& raw, int workers) {
    nlcalib::OracleOptions options;
    options.workers = workers;
    if (raw.contains("oracle")) {
        const auto& o = raw.at("oracle");
        options.budget = o.value("budget", options.budget);
        options.tie_tolerance = o.value("tie_tolerance", options.tie_tolerance);
    }
    if (const char* env = std::getenv("NLCALIB_BUDGET")) {
        try {
            options.budget = std::stoi(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("NLCALIB_BUDGET must be an integer");
        }
    }
    return options;
}

ordered_json timings_json(std::chrono::steady_clock::time_point start) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ordered_json t;
    t["total_seconds"] = seconds;
    return t;
}

int cmd_perimeter(const CommonOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const nlcalib::ScenarioConfig config =
        nlcalib::scenario_from_json(raw_config(options.config_path));
    const BuiltScenario scenario = nlcalib::build_scenario(config);

    const double direct = nlcalib::perimeter(scenario.e, scenario.table);
    const double paired = nlcalib::perimeter_pairform(scenario.e, scenario.table);
    const double residual = std::abs(direct - paired);
    const double tolerance = 1e-12 * std::max(1.0, std::abs(direct));
    const bool pass = residual <= tolerance;

    ordered_json report;
    report["command"] = "perimeter";
    report["scenario"] = nlcalib::scenario_echo_json(config);
    report["warnings"] = scenario.warnings;
    report["perimeter"] = direct;
    report["perimeter_pairform"] = paired;
    report["residual"] = residual;
    report["tolerance"] = tolerance;
    report["pass"] = pass;
    report["timings"] = timings_json(start);
    emit(options, render(report));
    return pass ? kExitPass : kExitVerificationFailure;
}

int cmd_curvature(const CommonOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const nlcalib::ScenarioConfig config =
        nlcalib::scenario_from_json(raw_config(options.config_path));
    const BuiltScenario scenario = nlcalib::build_scenario(config);
    const nlcalib::Lattice& lat = *scenario.lattice;

    ordered_json cells = ordered_json::array();
    std::string csv = "cell,set_curvature,level_curvature\n";
    for (long x : lat.window_cells()) {
        const double set_curv = nlcalib::nmc_set(scenario.e, x, scenario.table);
        ordered_json row;
        row["cell"] = x;
        row["set_curvature"] = set_curv;
        csv += std::to_string(x) + ',';
        {
            char buffer[40];
            std::snprintf(buffer, sizeof(buffer), "%.17g", set_curv);
            csv += buffer;
        }
        if (std::isfinite(scenario.phi.get(x))) {
            const double level_curv = nlcalib::nmc_level(scenario.phi, x, scenario.table);
            row["level_curvature"] = level_curv;
            char buffer[40];
            std::snprintf(buffer, sizeof(buffer), ",%.17g", level_curv);
            csv += buffer;
        } else {
            row["level_curvature"] = nullptr;
            csv += ",";
        }
        csv += '\n';
        cells.push_back(row);
    }

    if (options.format == "csv") {
        emit(options, csv);
        return kExitPass;
    }
    ordered_json report;
    report["command"] = "curvature";
    report["scenario"] = nlcalib::scenario_echo_json(config);
    report["cells"] = cells;
    report["timings"] = timings_json(start);
    emit(options, render(report));
    return kExitPass;
}

int cmd_calibrate(const CommonOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const nlcalib::ScenarioConfig config =
        nlcalib::scenario_from_json(raw_config(options.config_path));
    const BuiltScenario scenario = nlcalib::build_scenario(config);

    const double p = nlcalib::perimeter(scenario.e, scenario.table);
    const double pair = nlcalib::calibration_pairform(scenario.e, scenario.phi, scenario.table);
    const double curv = nlcalib::calibration_curvform(scenario.e, scenario.phi, scenario.table);
    const double residual = std::abs(pair - curv);
    const double tolerance = 1e-12 * std::max(1.0, std::abs(pair));
    const double slack = p - pair;
    const bool pass = residual <= tolerance && slack >= -tolerance;

    ordered_json report;
    report["command"] = "calibrate";
    report["scenario"] = nlcalib::scenario_echo_json(config);
    report["perimeter"] = p;
    report["calibration_pairform"] = pair;
    report["calibration_curvform"] = curv;
    report["form_residual"] = residual;
    report["tolerance"] = tolerance;
    report["calibration_slack"] = slack;
    report["pass"] = pass;
    report["timings"] = timings_json(start);
    emit(options, render(report));
    return pass ? kExitPass : kExitVerificationFailure;
}

int cmd_certify(const CommonOptions& options, const std::string& require, bool with_oracle) {
    const auto start = std::chrono::steady_clock::now();
    const nlohmann::json raw = raw_config(options.config_path);
    const nlcalib::ScenarioConfig config = nlcalib::scenario_from_json(raw);
    const BuiltScenario scenario = nlcalib::build_scenario(config);

    double sign_tolerance = 0.0;
    if (raw.contains("certify"))
        sign_tolerance = raw.at("certify").value("sign_tolerance", 0.0);

    const nlcalib::FoliationCertificate cert =
        nlcalib::certify(scenario.e, scenario.phi, scenario.table, sign_tolerance);

    ordered_json report;
    report["command"] = "certify";
    report["scenario"] = nlcalib::scenario_echo_json(config);
    report["certificate"] = nlcalib::certificate_json(cert);
    if (cert.status == nlcalib::FoliationStatus::TwoSided)
        report["uniqueness"] = nlcalib::uniqueness_json(
            nlcalib::check_uniqueness_hypotheses(scenario.e, scenario.phi, scenario.table));

    bool oracle_pass = true;
    if (with_oracle) {
        const nlcalib::OracleCrossCheck check = nlcalib::verify_certificate_against_oracle(
            scenario.e, scenario.phi, scenario.table, oracle_options(raw, options.workers));
        report["oracle_cross_check"] = nlcalib::cross_check_json(check);
        oracle_pass = check.passed;
    }

    bool status_ok = false;
    if (require == "any")
        status_ok = true;
    else if (require == "two_sided")
        status_ok = cert.status == nlcalib::FoliationStatus::TwoSided;
    else if (require == "one_sided_inside")
        status_ok = cert.status == nlcalib::FoliationStatus::TwoSided ||
                    cert.status == nlcalib::FoliationStatus::OneSidedInside;
    else if (require == "one_sided_outside")
        status_ok = cert.status == nlcalib::FoliationStatus::TwoSided ||
                    cert.status == nlcalib::FoliationStatus::OneSidedOutside;

    const bool pass = status_ok && oracle_pass;
    report["pass"] = pass;
    report["timings"] = timings_json(start);
    emit(options, render(report));
    return pass ? kExitPass : kExitVerificationFailure;
}

int cmd_oracle(const CommonOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const nlohmann::json raw = raw_config(options.config_path);
    const nlcalib::ScenarioConfig config = nlcalib::scenario_from_json(raw);
    const BuiltScenario scenario = nlcalib::build_scenario(config);

    const nlcalib::EnumerationResult enumeration = nlcalib::enumerate_minimizers(
        scenario.e, scenario.table, oracle_options(raw, options.workers));

    bool all_stationary = true;
    ordered_json audits = ordered_json::array();
    for (uint32_t bits : enumeration.minimizers) {
        nlcalib::IndicatorField f = scenario.e;
        f.set_window_bits(bits);
        const nlcalib::StationarityReport audit =
            nlcalib::single_flip_stationarity(f, scenario.table);
        ordered_json row;
        row["window_bits"] = bits;
        row["stationary"] = audit.stationary();
        row["violations"] = audit.violations;
        audits.push_back(row);
        all_stationary &= audit.stationary();
    }

    const bool e_attains = std::binary_search(enumeration.minimizers.begin(),
                                              enumeration.minimizers.end(),
                                              scenario.e.window_bits());

    ordered_json report;
    report["command"] = "oracle";
    report["scenario"] = nlcalib::scenario_echo_json(config);
    report["enumeration"] = nlcalib::enumeration_json(enumeration);
    report["scenario_set_attains_minimum"] = e_attains;
    report["stationarity_audits"] = audits;
    report["pass"] = all_stationary;
    report["timings"] = timings_json(start);
    emit(options, render(report));
    return all_stationary ? kExitPass : kExitVerificationFailure;
}

int cmd_study(const CommonOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const nlcalib::StudyConfig config = nlcalib::study_from_json(raw_config(options.config_path));
    const nlcalib::StudyResult result = nlcalib::refinement_study(config);

    if (options.format == "csv") {
        emit(options, nlcalib::study_csv(result));
        return kExitPass;
    }
    ordered_json report;
    report["command"] = "study";
    report["study"] = nlcalib::study_json(result);
    report["timings"] = timings_json(start);
    emit(options, render(report));
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal perimeter calibration toolkit"};
    app.require_subcommand(1);

    CommonOptions perimeter_opts;
    add_common(app.add_subcommand("perimeter", "perimeter via both formulas"), perimeter_opts,
               false);

    CommonOptions curvature_opts;
    add_common(app.add_subcommand("curvature", "per-cell window curvatures"), curvature_opts,
               false);

    CommonOptions calibrate_opts;
    add_common(app.add_subcommand("calibrate", "calibration functional, both forms"),
               calibrate_opts, false);

    CommonOptions certify_opts;
    std::string require = "two_sided";
    bool with_oracle = false;
    CLI::App* certify = app.add_subcommand("certify", "foliation sign certificate");
    add_common(certify, certify_opts, true);
    certify->add_option("--require", require, "status needed for exit code 0")
        ->check(CLI::IsMember({"two_sided", "one_sided_inside", "one_sided_outside", "any"}));
    certify->add_flag("--oracle", with_oracle, "cross-check the certificate by enumeration");

    CommonOptions oracle_opts;
    add_common(app.add_subcommand("oracle", "exhaustive minimizer enumeration"), oracle_opts,
               true);

    CommonOptions study_opts;
    add_common(app.add_subcommand("study", "refinement study"), study_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (app.got_subcommand("perimeter")) return cmd_perimeter(perimeter_opts);
        if (app.got_subcommand("curvature")) return cmd_curvature(curvature_opts);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(calibrate_opts);
        if (app.got_subcommand("certify")) return cmd_certify(certify_opts, require, with_oracle);
        if (app.got_subcommand("oracle")) return cmd_oracle(oracle_opts);
        if (app.got_subcommand("study")) return cmd_study(study_opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "internal check failed: " << e.what() << "\n";
        return kExitVerificationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
