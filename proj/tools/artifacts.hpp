#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace ellreg::cli {

using Cell = std::variant<std::string, long long, double, bool>;

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    Table(std::string n, std::vector<std::string> h) : name(std::move(n)), header(std::move(h)) {}
    void add(std::vector<Cell> row);
};

/// Two-column series written as TSV.
struct Series {
    std::string name;
    std::string x_label, y_label;
    std::vector<std::pair<double, double>> points;
};

struct Artifacts {
    nlohmann::json results = nlohmann::json::object();
    std::vector<Table> tables;
    std::vector<Series> series;
    /// Extra JSON documents written next to results.json, by file name.
    std::vector<std::pair<std::string, nlohmann::json>> documents;
};

/// Shortest decimal that round-trips, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double v);
/// Finite numbers as JSON numbers, the rest as the strings above.
nlohmann::json number(double v);
nlohmann::json numbers(const std::vector<double>& v);

/// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or line break.
std::string to_csv(const Table& t);
std::string to_tsv(const Series& s);

/// Writes results.json, tables/<name>.csv, plots/<name>.tsv, the extra
/// documents and manifest.json into `dir`. Returns the written file names,
/// relative to `dir`, in a fixed order.
std::vector<std::string> write_artifacts(const std::filesystem::path& dir, const Artifacts& a,
                                         const nlohmann::json& config, const std::vector<std::string>& anchors);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace ellreg::cli
