#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ellreg/grid.hpp"

namespace ellreg::cli {

inline constexpr const char* kConfigSchema = "ellreg.config/1";
inline constexpr const char* kResultsSchema = "ellreg.results/1";
inline constexpr const char* kManifestSchema = "ellreg.manifest/1";
inline constexpr const char* kCatalogSchema = "ellreg.catalog/1";
inline constexpr const char* kCalibrationSchema = "ellreg.calibration/1";

/// Malformed or inconsistent configuration; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A library failure during a run, tagged with the operation that raised it;
/// maps to exit status 3.
class ExperimentError : public std::runtime_error {
public:
    ExperimentError(std::string operation, std::string kind, const std::string& what)
        : std::runtime_error(what), operation_(std::move(operation)), kind_(std::move(kind)) {}
    const std::string& operation() const { return operation_; }
    const std::string& kind() const { return kind_; }

private:
    std::string operation_, kind_;
};

struct ExperimentConfig {
    std::string kind;
    GridSpec grid;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    nlohmann::json parameters = nlohmann::json::object();
    /// Directory of the config file; relative file references resolve against it.
    std::filesystem::path base_dir;

    /// Canonical form with every default filled in.
    nlohmann::json to_json() const;
};

/// Parses a config document. Missing grid, seed, output_dir and parameters
/// entries take the defaults of the kind; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);

/// Number or arithmetic expression in x-free form ("pi / 2").
double scalar(const nlohmann::json& j, const std::string& where);
/// Exponent in [1, inf]: a number or the string "inf".
double exponent(const nlohmann::json& j, const std::string& where);
nlohmann::json exponent_to_json(double p);

/// Typed access to a kind's parameter table. Every key must appear in the
/// defaults; values not given fall back to them.
class ParamReader {
public:
    ParamReader(const nlohmann::json& given, const nlohmann::json& defaults, std::string where);

    const nlohmann::json& raw(const std::string& key) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double lo, double hi) const;
    int integer(const std::string& key, int lo, int hi) const;
    bool flag(const std::string& key) const;
    std::string choice(const std::string& key, const std::vector<std::string>& allowed) const;
    std::string text(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<double> exponents(const std::string& key) const;
    std::vector<std::string> choices(const std::string& key, const std::vector<std::string>& allowed) const;

    const nlohmann::json& merged() const { return merged_; }

private:
    std::string at(const std::string& key) const { return where_ + "." + key; }
    nlohmann::json merged_;
    std::string where_;
};

} // namespace ellreg::cli
