#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artifacts.hpp"
#include "config.hpp"
#include "ellreg/error.hpp"

namespace ellreg::cli {

using Runner = std::function<Artifacts()>;

struct Experiment {
    std::string kind;
    std::string summary;
    /// Descriptive names of the results an experiment exercises.
    std::vector<std::string> anchors;
    GridSpec default_grid;
    nlohmann::json default_parameters;
    /// Checks the parameters (throwing ConfigError) and binds the run.
    std::function<Runner(const ExperimentConfig&)> prepare;
};

const std::vector<Experiment>& catalog();
/// Throws ConfigError for an unknown kind.
const Experiment& find_experiment(const std::string& kind);
nlohmann::json default_config(const Experiment& e);
/// Machine-readable catalog, see schemas/catalog.schema.json.
nlohmann::json catalog_json();

/// Runs `fn`, turning a library error into an ExperimentError naming `operation`.
template <class Fn>
auto guarded(const std::string& operation, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ellreg::Error& e) {
        throw ExperimentError(operation, e.kind(), e.what());
    }
}

} // namespace ellreg::cli
