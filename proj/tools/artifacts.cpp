#include "artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "config.hpp"
#include "ellreg/rng.hpp"

namespace ellreg::cli {

using nlohmann::json;

void Table::add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw std::logic_error("table '" + name + "': row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

namespace {

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, double>) return format_number(v);
            else return std::to_string(v);
        },
        c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string tsv_field(std::string s) {
    for (char& ch : s)
        if (ch == '\t' || ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

} // namespace

std::string to_csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
        out += "\r\n";
    };
    line(t.header);
    for (const auto& row : t.rows) {
        std::vector<std::string> f;
        for (const auto& c : row) f.push_back(cell_text(c));
        line(f);
    }
    return out;
}

std::string to_tsv(const Series& s) {
    std::string out = tsv_field(s.x_label) + "\t" + tsv_field(s.y_label) + "\n";
    for (const auto& [x, y] : s.points) out += format_number(x) + "\t" + format_number(y) + "\n";
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::vector<std::string> write_artifacts(const std::filesystem::path& dir, const Artifacts& a, const json& config,
                                         const std::vector<std::string>& anchors) {
    std::vector<std::string> files;
    const json results = {{"schema", kResultsSchema},
                          {"kind", config.at("kind")},
                          {"config", config},
                          {"results", a.results}};
    write_text(dir / "results.json", results.dump(2) + "\n");
    files.push_back("results.json");
    for (const auto& t : a.tables) {
        files.push_back("tables/" + t.name + ".csv");
        write_text(dir / files.back(), to_csv(t));
    }
    for (const auto& s : a.series) {
        files.push_back("plots/" + s.name + ".tsv");
        write_text(dir / files.back(), to_tsv(s));
    }
    for (const auto& [name, doc] : a.documents) {
        files.push_back(name);
        write_text(dir / name, doc.dump(2) + "\n");
    }
    const json manifest = {{"schema", kManifestSchema},
                           {"kind", config.at("kind")},
                           {"anchors", anchors},
                           {"seed", config.at("seed")},
                           {"rng", Rng::kAlgorithm},
                           {"results_schema", kResultsSchema},
                           {"files", files}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    files.push_back("manifest.json");
    return files;
}

} // namespace ellreg::cli
