// ellreg: experiment runner for the elliptic-regularity toolkit.
//
//   ellreg list [--json]
//   ellreg validate <config>
//   ellreg run <config>
//   ellreg calibrate [--config <config>]
//
// Artifacts go to <root>/<output_dir>, where root is $ELLREG_OUTPUT_ROOT or
// the working directory. Exit status: 0 ok, 2 config error, 3 experiment error.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "artifacts.hpp"
#include "config.hpp"
#include "experiments.hpp"

namespace fs = std::filesystem;
using namespace ellreg::cli;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kConfigStatus = 2, kExperimentStatus = 3;

fs::path output_path(const ExperimentConfig& c) {
    if (c.output_dir.is_absolute()) return c.output_dir;
    const char* root = std::getenv("ELLREG_OUTPUT_ROOT");
    return (root && *root ? fs::path(root) : fs::current_path()) / c.output_dir;
}

int report(int status, const std::string& category, const std::string& kind, const std::string& operation,
           const std::string& message, const fs::path& dir = {}) {
    json record = {{"status", status}, {"category", category}, {"kind", kind}, {"message", message}};
    if (!operation.empty()) record["operation"] = operation;
    const json doc = {{"error", record}};
    std::cerr << doc.dump() << "\n";
    if (!dir.empty()) {
        try {
            write_text(dir / "error.json", doc.dump(2) + "\n");
        } catch (const std::exception&) {
        }
    }
    return status;
}

int execute(const ExperimentConfig& c) {
    const fs::path dir = output_path(c);
    try {
        const Runner run = find_experiment(c.kind).prepare(c);
        const Artifacts a = run();
        fs::remove(dir / "error.json");
        const auto files = write_artifacts(dir, a, c.to_json(), find_experiment(c.kind).anchors);
        std::cout << json{{"kind", c.kind}, {"output_dir", dir.string()}, {"files", files}}.dump(2) << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        return report(kConfigStatus, "config", "ConfigError", "", e.what());
    } catch (const ExperimentError& e) {
        return report(kExperimentStatus, "experiment", e.kind(), e.operation(), e.what(), dir);
    } catch (const ellreg::Error& e) {
        return report(kExperimentStatus, "experiment", e.kind(), c.kind, e.what(), dir);
    } catch (const std::exception& e) {
        return report(kExperimentStatus, "experiment", "internal", c.kind, e.what(), dir);
    }
}

template <class Fn>
int with_config(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        return report(kConfigStatus, "config", "ConfigError", "", e.what());
    }
}

void print_catalog(bool as_json) {
    const json cat = catalog_json();
    if (as_json) {
        std::cout << cat.dump(2) << "\n";
        return;
    }
    for (const auto& e : cat["experiments"]) {
        std::cout << e["kind"].get<std::string>() << "\n  " << e["summary"].get<std::string>() << "\n";
        for (const auto& a : e["anchors"]) std::cout << "  anchor: " << a.get<std::string>() << "\n";
        std::cout << "  default config: " << e["default_config"].dump() << "\n\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiment runner for elliptic regularity numerics"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "Print every experiment kind with its anchors and default config");
    bool list_json = false;
    list->add_flag("--json", list_json, "Machine-readable catalog");

    std::string config_path;
    auto* validate = app.add_subcommand("validate", "Check a config and print its canonical form");
    validate->add_option("config", config_path, "Config file")->required();

    auto* run = app.add_subcommand("run", "Run the experiment described by a config");
    run->add_option("config", config_path, "Config file")->required();

    std::string calibrate_path;
    auto* calibrate = app.add_subcommand("calibrate", "Regenerate the Besov calibration table");
    calibrate->add_option("--config", calibrate_path, "Config of kind calibrate (defaults apply when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigStatus;
    }

    if (list->parsed()) {
        print_catalog(list_json);
        return kOk;
    }
    if (validate->parsed())
        return with_config([&] {
            std::cout << load_config(config_path).to_json().dump(2) << "\n";
            return kOk;
        });
    if (run->parsed()) return with_config([&] { return execute(load_config(config_path)); });
    return with_config([&] {
        const ExperimentConfig c = calibrate_path.empty() ? parse_config(default_config(find_experiment("calibrate")))
                                                          : load_config(calibrate_path);
        if (c.kind != "calibrate") throw ConfigError("calibrate: config kind must be \"calibrate\"");
        return execute(c);
    });
}
