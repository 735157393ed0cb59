#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ellreg/error.hpp"
#include "ellreg/operator_io.hpp"
#include "experiments.hpp"

namespace ellreg::cli {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

} // namespace

double scalar(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ConfigError(where + ": expected a number or constant expression");
    try {
        // coordinates are NaN here, so any dependence on x shows up as a non-finite value
        const std::vector<double> nowhere(8, std::numeric_limits<double>::quiet_NaN());
        const cplx v = io::Expression(j.get<std::string>())(nowhere);
        if (!std::isfinite(v.real()) || v.imag() != 0.0)
            throw ConfigError(where + ": '" + j.get<std::string>() + "' is not a real constant");
        return v.real();
    } catch (const FormatError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

double exponent(const json& j, const std::string& where) {
    if (j.is_string() && j.get<std::string>() == "inf") return kInf;
    if (!j.is_number()) throw ConfigError(where + ": expected an exponent (number >= 1 or \"inf\")");
    const double p = j.get<double>();
    if (!(p >= 1.0)) throw ConfigError(where + ": exponent must be >= 1");
    return p;
}

json exponent_to_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

json grid_to_json(const GridSpec& g) {
    return {{"dim", g.dim}, {"points", g.points}, {"half_period", g.half_period}};
}

GridSpec grid_from_json(const json& j) {
    require_keys(j, {"dim", "points", "half_period"}, "grid");
    if (!j.contains("dim") || !j.contains("points")) throw ConfigError("grid: 'dim' and 'points' are required");
    if (!j["dim"].is_number_integer() || !j["points"].is_number_integer())
        throw ConfigError("grid: 'dim' and 'points' must be integers");
    const double L = j.contains("half_period") ? scalar(j["half_period"], "grid.half_period") : kPi;
    try {
        return GridSpec(j["dim"].get<int>(), j["points"].get<int>(), L);
    } catch (const ellreg::Error& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

json ExperimentConfig::to_json() const {
    return {{"schema", kConfigSchema},   {"kind", kind},
            {"grid", grid_to_json(grid)}, {"seed", seed},
            {"output_dir", output_dir.generic_string()}, {"parameters", parameters}};
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    require_keys(doc, {"schema", "kind", "grid", "seed", "output_dir", "parameters"}, "config");
    if (!doc.contains("schema") || doc["schema"] != kConfigSchema)
        throw ConfigError(std::string("config: 'schema' must be \"") + kConfigSchema + "\"");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("config: 'kind' is required");

    const Experiment& exp = find_experiment(doc["kind"].get<std::string>());
    ExperimentConfig c;
    c.kind = exp.kind;
    c.base_dir = base_dir;
    c.grid = doc.contains("grid") ? grid_from_json(doc["grid"]) : exp.default_grid;
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("config: 'seed' must be a nonnegative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string() || doc["output_dir"].get<std::string>().empty())
            throw ConfigError("config: 'output_dir' must be a nonempty string");
        c.output_dir = doc["output_dir"].get<std::string>();
    } else {
        c.output_dir = exp.kind;
    }
    const json given = doc.contains("parameters") ? doc["parameters"] : json::object();
    c.parameters = ParamReader(given, exp.default_parameters, "parameters").merged();
    // parse once so that every typed check runs at validation time
    exp.prepare(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

ParamReader::ParamReader(const json& given, const json& defaults, std::string where)
    : merged_(defaults), where_(std::move(where)) {
    if (!given.is_object()) throw ConfigError(where_ + ": expected an object");
    for (const auto& [key, value] : given.items()) {
        if (!defaults.contains(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
        merged_[key] = value;
    }
}

const json& ParamReader::raw(const std::string& key) const {
    if (!merged_.contains(key)) throw ConfigError(at(key) + ": missing");
    return merged_.at(key);
}

double ParamReader::number(const std::string& key) const { return scalar(raw(key), at(key)); }

double ParamReader::number(const std::string& key, double lo, double hi) const {
    const double v = number(key);
    if (!(v >= lo && v <= hi))
        throw ConfigError(at(key) + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return v;
}

int ParamReader::integer(const std::string& key, int lo, int hi) const {
    const json& j = raw(key);
    if (!j.is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
    const long long v = j.get<long long>();
    if (v < lo || v > hi)
        throw ConfigError(at(key) + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return static_cast<int>(v);
}

bool ParamReader::flag(const std::string& key) const {
    const json& j = raw(key);
    if (!j.is_boolean()) throw ConfigError(at(key) + ": expected true or false");
    return j.get<bool>();
}

std::string ParamReader::text(const std::string& key) const {
    const json& j = raw(key);
    if (!j.is_string()) throw ConfigError(at(key) + ": expected a string");
    return j.get<std::string>();
}

std::string ParamReader::choice(const std::string& key, const std::vector<std::string>& allowed) const {
    const std::string v = text(key);
    for (const auto& a : allowed)
        if (a == v) return v;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(at(key) + ": '" + v + "' is not one of " + list);
}

std::vector<double> ParamReader::numbers(const std::string& key) const {
    const json& j = raw(key);
    if (!j.is_array() || j.empty()) throw ConfigError(at(key) + ": expected a nonempty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar(j[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> ParamReader::exponents(const std::string& key) const {
    const json& j = raw(key);
    if (!j.is_array() || j.empty()) throw ConfigError(at(key) + ": expected a nonempty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(exponent(j[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::string> ParamReader::choices(const std::string& key, const std::vector<std::string>& allowed) const {
    const json& j = raw(key);
    if (!j.is_array() || j.empty()) throw ConfigError(at(key) + ": expected a nonempty array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = at(key) + "[" + std::to_string(i) + "]";
        if (!j[i].is_string()) throw ConfigError(where + ": expected a string");
        const std::string v = j[i].get<std::string>();
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == v;
        if (!ok) throw ConfigError(where + ": unknown value '" + v + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace ellreg::cli
