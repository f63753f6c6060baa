#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nlcalib/io.hpp"
#include "nlcalib/oracle.hpp"
#include "nlcalib/scenario.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "nlcalib_cli_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const auto dir = scratch_dir();
    const auto out_path = dir / "run_stdout.txt";
    const auto err_path = dir / "run_stderr.txt";
    const std::string command = env_prefix + NLCALIB_CLI_PATH + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    RunResult result;
    if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::string write_config(const std::string& name, const json& j) {
    const auto path = scratch_dir() / name;
    std::ofstream(path) << j.dump(2) << "\n";
    return path.string();
}

// unit-spacing dyadic line: exponential weights 1/2, 1/4, 1/8 between
// consecutive cells make the halfspace perimeter land exactly on 1.0
json toy_config() {
    return json::parse(R"({
        "name": "toy",
        "seed": 1,
        "kernel": {"family": "exponential", "rate": 0.69314718055994531},
        "lattice": {"dimension": 1, "universe": [0, 3], "window": [1, 2]},
        "construction": {"type": "halfspace", "normal": [1.0], "offset": 2.0}
    })");
}

json one_sided_config() {
    return json::parse(R"({
        "name": "heavy-left",
        "seed": 2,
        "kernel": {"family": "fractional_power", "alpha": 0.5},
        "lattice": {"dimension": 1, "universe": [-8, 4], "window": [-1, 1]},
        "construction": {"type": "halfspace", "normal": [1.0], "offset": 1.0}
    })");
}

json two_sided_config() {
    return json::parse(R"({
        "name": "balanced-rows",
        "seed": 3,
        "kernel": {"family": "fractional_power", "alpha": 0.5},
        "lattice": {"dimension": 2,
                    "universe": [[-3, 3], [-4, 4]], "window": [[0, 0], [-2, 2]]},
        "construction": {"type": "halfspace", "normal": [1.0, 0.0], "offset": 1.0}
    })");
}

json oracle_config() {
    return json::parse(R"({
        "name": "cut",
        "seed": 4,
        "kernel": {"family": "fractional_power", "alpha": 0.5},
        "lattice": {"dimension": 1, "universe": [-6, 6], "window": [-2, 2]},
        "construction": {"type": "halfspace", "normal": [1.0], "offset": 1.0}
    })");
}

json strip_timings(const std::string& text) {
    json j = json::parse(text);
    j.erase("timings");
    return j;
}

}  // namespace

TEST_SUITE("command line basics") {
    TEST_CASE("help and usage errors") {
        CHECK(run_cli("--help").code == 0);
        const RunResult bare = run_cli("");
        CHECK(bare.code == 2);
        CHECK(run_cli("frobnicate").code == 2);
        CHECK(run_cli("perimeter").code == 2);  // --config is required
        CHECK(run_cli("certify --config x.json --require bogus").code == 2);
    }

    TEST_CASE("config errors exit with code 2") {
        const RunResult missing = run_cli("perimeter --config /nonexistent/cfg.json");
        CHECK(missing.code == 2);
        CHECK(missing.err.find("cannot open") != std::string::npos);

        const auto broken = scratch_dir() / "broken.json";
        std::ofstream(broken) << "{ not json";
        const RunResult parse = run_cli("perimeter --config " + broken.string());
        CHECK(parse.code == 2);
        CHECK(parse.err.find("parse error") != std::string::npos);

        json bad = toy_config();
        bad.erase("seed");
        const RunResult invalid = run_cli("perimeter --config " + write_config("noseed.json", bad));
        CHECK(invalid.code == 2);
        CHECK(invalid.err.find("seed") != std::string::npos);
    }

    TEST_CASE("reports go to a file with --out") {
        const std::string config = write_config("toy.json", toy_config());
        const auto out = scratch_dir() / "report.json";
        std::filesystem::remove(out);
        const RunResult run = run_cli("perimeter --config " + config + " --out " + out.string());
        CHECK(run.code == 0);
        CHECK(run.out.empty());
        const json report = json::parse(slurp(out));
        CHECK(report.at("command") == "perimeter");
    }
}

TEST_SUITE("perimeter and calibrate commands") {
    TEST_CASE("the dyadic toy lands exactly on one") {
        const std::string config = write_config("toy.json", toy_config());
        const RunResult run = run_cli("perimeter --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        CHECK(report.at("perimeter").get<double>() == 1.0);
        CHECK(report.at("perimeter_pairform").get<double>() == 1.0);
        CHECK(report.at("residual").get<double>() == 0.0);
        CHECK(report.at("pass") == true);
        CHECK(report.at("warnings").empty());
        CHECK(report.at("scenario").at("name") == "toy");
    }

    TEST_CASE("repeat runs are identical up to timings") {
        const std::string config = write_config("toy.json", toy_config());
        const RunResult a = run_cli("perimeter --config " + config);
        const RunResult b = run_cli("perimeter --config " + config);
        REQUIRE(a.code == 0);
        REQUIRE(b.code == 0);
        CHECK(strip_timings(a.out) == strip_timings(b.out));
    }

    TEST_CASE("calibration equals the perimeter on the foliated set") {
        const std::string config = write_config("rows.json", two_sided_config());
        const RunResult run = run_cli("calibrate --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        CHECK(report.at("pass") == true);
        CHECK(report.at("perimeter").get<double>() ==
              report.at("calibration_pairform").get<double>());
        CHECK(report.at("form_residual").get<double>() <= report.at("tolerance").get<double>());
        CHECK(report.at("calibration_slack").get<double>() == 0.0);
    }
}

TEST_SUITE("curvature command") {
    TEST_CASE("balanced rows report exactly zero curvatures in both formats") {
        const std::string config = write_config("rows.json", two_sided_config());
        const RunResult run = run_cli("curvature --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        REQUIRE(report.at("cells").size() == 5);
        for (const auto& row : report.at("cells")) {
            CHECK(row.at("set_curvature").get<double>() < 0.0);
            CHECK(row.at("level_curvature").get<double>() == 0.0);
        }

        const RunResult csv = run_cli("curvature --format csv --config " + config);
        REQUIRE(csv.code == 0);
        std::istringstream lines(csv.out);
        std::string line;
        std::getline(lines, line);
        CHECK(line == "cell,set_curvature,level_curvature");
        int rows = 0;
        while (std::getline(lines, line)) {
            CHECK(line.substr(line.rfind(',') + 1) == "0");
            ++rows;
        }
        CHECK(rows == 5);
    }
}

TEST_SUITE("certify command") {
    TEST_CASE("the require ladder maps statuses to exit codes") {
        const std::string config = write_config("left.json", one_sided_config());

        const RunResult strict = run_cli("certify --config " + config);
        CHECK(strict.code == 1);
        const json report = json::parse(strict.out);
        CHECK(report.at("certificate").at("status") == "one_sided_inside");
        CHECK(report.at("pass") == false);

        CHECK(run_cli("certify --require one_sided_inside --config " + config).code == 0);
        CHECK(run_cli("certify --require one_sided_outside --config " + config).code == 1);
        CHECK(run_cli("certify --require any --config " + config).code == 0);
    }

    TEST_CASE("two sided certificates carry uniqueness and survive the oracle") {
        const std::string config = write_config("rows.json", two_sided_config());
        const RunResult run = run_cli("certify --oracle --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        const json& cert = report.at("certificate");
        CHECK(cert.at("status") == "two_sided");
        CHECK(cert.at("null_lagrangian") == true);
        CHECK(cert.at("curvature_bound").get<double>() == 0.0);
        CHECK(cert.at("zero_level_measure") == 0);
        CHECK(cert.at("violations").empty());
        CHECK(report.at("uniqueness").at("satisfied") == true);
        const json& check = report.at("oracle_cross_check");
        CHECK(check.at("passed") == true);
        CHECK(check.at("unique_minimizer") == true);
        CHECK(check.at("enumeration").at("configurations_searched") == 32);
    }

    TEST_CASE("one sided certificates pass their restricted oracle") {
        const std::string config = write_config("left.json", one_sided_config());
        const RunResult run =
            run_cli("certify --require one_sided_inside --oracle --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        CHECK(report.at("oracle_cross_check").at("restricted") == true);
        CHECK(report.at("oracle_cross_check").at("passed") == true);
    }
}

TEST_SUITE("oracle command") {
    TEST_CASE("subprocess enumeration matches the in-process library") {
        const json config_json = oracle_config();
        const std::string config = write_config("cut.json", config_json);
        const RunResult run = run_cli("oracle --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);

        const nlcalib::BuiltScenario scenario =
            nlcalib::build_scenario(nlcalib::scenario_from_json(config_json));
        const nlcalib::EnumerationResult expected =
            nlcalib::enumerate_minimizers(scenario.e, scenario.table);

        const json& enumeration = report.at("enumeration");
        CHECK(enumeration.at("min_value").get<double>() == expected.min_value);
        CHECK(enumeration.at("minimizers").get<std::vector<uint32_t>>() == expected.minimizers);
        CHECK(enumeration.at("configurations_searched") == 32);

        // cuts hugging the window boundary straddle fewer long-range pairs, so
        // the tied minimizers are the all-out and all-in fillings, not the
        // centered halfspace
        CHECK(enumeration.at("minimizers") == json::array({0, 31}));
        CHECK(report.at("scenario_set_attains_minimum") == false);
        for (const auto& audit : report.at("stationarity_audits"))
            CHECK(audit.at("stationary") == true);
        CHECK(report.at("pass") == true);
    }

    TEST_CASE("the balanced rows scenario attains its own minimum") {
        const std::string config = write_config("rows.json", two_sided_config());
        const RunResult run = run_cli("oracle --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        CHECK(report.at("scenario_set_attains_minimum") == true);
        CHECK(report.at("enumeration").at("minimizers") == json::array({31}));
        CHECK(report.at("pass") == true);
    }

    TEST_CASE("worker counts do not change the report") {
        const std::string config = write_config("cut.json", oracle_config());
        const RunResult one = run_cli("oracle --workers 1 --config " + config);
        const RunResult four = run_cli("oracle --workers 4 --config " + config);
        const RunResult eight = run_cli("oracle --workers 8 --config " + config);
        REQUIRE(one.code == 0);
        REQUIRE(four.code == 0);
        REQUIRE(eight.code == 0);
        CHECK(strip_timings(one.out) == strip_timings(four.out));
        CHECK(strip_timings(one.out) == strip_timings(eight.out));
    }

    TEST_CASE("budgets flow from the config block and the environment") {
        json tight = oracle_config();
        tight["oracle"] = {{"budget", 4}};
        const std::string config = write_config("tight.json", tight);

        const RunResult blocked = run_cli("oracle --config " + config);
        CHECK(blocked.code == 2);
        CHECK(blocked.err.find("budget") != std::string::npos);

        // the environment variable wins over the config block
        const RunResult raised = run_cli("oracle --config " + config, "NLCALIB_BUDGET=20 ");
        CHECK(raised.code == 0);

        const RunResult junk = run_cli("oracle --config " + config, "NLCALIB_BUDGET=abc ");
        CHECK(junk.code == 2);
        CHECK(junk.err.find("NLCALIB_BUDGET") != std::string::npos);
    }
}

TEST_SUITE("study command") {
    TEST_CASE("halfspace studies emit zero rows in json and csv") {
        const json study = json::parse(R"({
            "study": {"kind": "halfspace_curvature", "spacings": [0.5, 0.25]},
            "kernel": {"family": "fractional_power", "alpha": 0.5}
        })");
        const std::string config = write_config("study.json", study);

        const RunResult run = run_cli("study --config " + config);
        REQUIRE(run.code == 0);
        const json report = json::parse(run.out);
        CHECK(report.at("study").at("kind") == "halfspace_curvature");
        REQUIRE(report.at("study").at("rows").size() == 2);
        for (const auto& row : report.at("study").at("rows"))
            CHECK(row.at("value").get<double>() == 0.0);
        CHECK(report.at("study").at("rows")[0].at("observed_order").is_null());
        CHECK(report.at("study").at("monotone_error") == true);

        const RunResult csv = run_cli("study --format csv --config " + config);
        REQUIRE(csv.code == 0);
        std::istringstream lines(csv.out);
        std::string line;
        std::getline(lines, line);
        CHECK(line == "h,value,reference,abs_error,rel_error,observed_order");
        std::getline(lines, line);
        CHECK(line.rfind("0.5,0,0,0,0,", 0) == 0);
    }

    TEST_CASE("study config errors exit with code 2") {
        const json bad = json::parse(R"({
            "study": {"kind": "interval_perimeter", "spacings": [0.3]},
            "kernel": {"family": "fractional_power", "alpha": 0.5}
        })");
        const RunResult run = run_cli("study --config " + write_config("badstudy.json", bad));
        CHECK(run.code == 2);
        CHECK(run.err.find("multiple of every") != std::string::npos);
    }
}
