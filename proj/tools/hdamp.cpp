// hdamp: run scenarios and extract plot series.
//
//   hdamp run --scenario <name> [--config <file>] [--ctx.N 2.0 ...] --out <dir>
//   hdamp plot --report <file> --series <name> [--out <file>]
//
// Exit status: 0 all verdicts pass, 1 some verdict failed, 2 usage or
// configuration error, 3 file I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "hdamp/config.hpp"
#include "hdamp/scenarios.hpp"

namespace {

constexpr int kExitVerdictFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int run(const std::string& scenario, const std::string& config_path, const std::map<std::string, std::string>& flags,
        const std::string& out_dir) {
    hdamp::KeyValues given;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "hdamp: cannot open config file " << config_path << "\n";
            return kExitIo;
        }
        given = hdamp::parse_key_values(in);
    }
    if (!scenario.empty()) {
        given["scenario"] = scenario;
    }
    for (const auto& [key, value] : flags) {
        given[key] = value;
    }
    const hdamp::ScenarioConfig config = hdamp::resolve_config(given);
    const hdamp::ScanReport report = hdamp::run_scenario(config);
    hdamp::write_report(report, out_dir);

    for (const hdamp::Verdict& v : report.verdicts) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
    }
    std::cout << "report written to " << out_dir << "\n";
    return report.pass() ? 0 : kExitVerdictFailed;
}

int plot(const std::string& report_path, const std::string& series, std::string out) {
    const hdamp::json report = hdamp::read_report(report_path);
    if (out.empty()) {
        out = (std::filesystem::path(report_path).parent_path() / (series + ".csv")).string();
    }
    std::cout << hdamp::emit_plot_series(report, series, out).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial-wave amplitude bounds: scenario runner"};
    app.require_subcommand(1);

    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario and write report.json, rows.csv and series CSVs");
    std::string scenario, config_path, out_dir;
    run_cmd->add_option("--scenario", scenario, "Scenario name");
    run_cmd->add_option("--config", config_path, "key=value configuration file");
    run_cmd->add_option("--out", out_dir, "Output directory")->required();

    // Every configuration key is also a flag of the same dotted name.
    std::map<std::string, std::string> flag_values;
    for (const auto& [key, value] : hdamp::default_key_values(hdamp::Scenario::sigma_scaling)) {
        if (key != "scenario") {
            flag_values[key];
        }
    }
    for (auto& [key, value] : flag_values) {
        run_cmd->add_option("--" + key, value, "Override configuration key " + key);
    }

    CLI::App* plot_cmd = app.add_subcommand("plot", "Write one series of a report as two-column CSV");
    std::string report_path, series, plot_out;
    plot_cmd->add_option("--report", report_path, "report.json from a run")->required();
    plot_cmd->add_option("--series", series, "Series name")->required();
    plot_cmd->add_option("--out", plot_out, "Output CSV (default: <series>.csv next to the report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd) {
            std::map<std::string, std::string> flags;
            for (const auto& [key, value] : flag_values) {
                if (run_cmd->count("--" + key) > 0) {
                    flags[key] = value;
                }
            }
            return run(scenario, config_path, flags, out_dir);
        }
        return plot(report_path, series, plot_out);
    } catch (const hdamp::config_error& e) {
        std::cerr << "hdamp: configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hdamp::io_error& e) {
        std::cerr << "hdamp: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "hdamp: " << e.what() << "\n";
        return kExitUsage;
    }
}
