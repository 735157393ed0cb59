#include "ellreg/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ellreg/error.hpp"

namespace ellreg::io {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'L', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kByteOrderMark = 0x01020304u;

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), 4);
}

void put_f64(std::ostream& os, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw FormatError("field file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("field file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

} // namespace

void write_binary(std::ostream& os, const Field& f) {
    const GridSpec& g = f.grid();
    os.write(kMagic.data(), 4);
    put_u32(os, kVersion);
    put_u32(os, kByteOrderMark);
    put_u32(os, static_cast<std::uint32_t>(g.dim));
    put_u32(os, static_cast<std::uint32_t>(g.points));
    put_f64(os, g.half_period);
    put_u32(os, static_cast<std::uint32_t>(f.channels()));
    put_u32(os, 0);
    for (const cplx& z : f.data()) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
}

Field read_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || magic != kMagic) throw FormatError("not an ellreg field file (bad magic)");
    if (get_u32(is) != kVersion) throw FormatError("unsupported field file version");
    if (get_u32(is) != kByteOrderMark) throw FormatError("field file is not little-endian");
    const auto m = static_cast<int>(get_u32(is));
    const auto n = static_cast<int>(get_u32(is));
    const double l = get_f64(is);
    const auto channels = static_cast<int>(get_u32(is));
    (void)get_u32(is);
    if (m < 1 || m > 6 || channels < 1) throw FormatError("field header out of range");
    GridSpec g(m, n, l);
    std::vector<cplx> data(g.size() * static_cast<std::size_t>(channels));
    for (auto& z : data) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        z = {re, im};
    }
    Field f(g, channels, std::move(data));
    if (!f.all_finite()) throw FormatError("field file contains non-finite samples");
    return f;
}

void save(const std::filesystem::path& path, const Field& f) {
    if (path.extension() == ".json") {
        std::ofstream os(path);
        if (!os) throw FormatError("cannot open " + path.string());
        os << to_json(f).dump() << '\n';
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string());
    write_binary(os, f);
}

Field load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    std::array<char, 4> head{};
    is.read(head.data(), 4);
    const bool binary = is.gcount() == 4 && head == kMagic;
    is.clear();
    is.seekg(0);
    if (binary) return read_binary(is);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json to_json(const Field& f) {
    nlohmann::json samples = nlohmann::json::array();
    for (const cplx& z : f.data()) samples.push_back({z.real(), z.imag()});
    return {{"format", "ellreg-field"},
            {"version", kVersion},
            {"m", f.grid().dim},
            {"N", f.grid().points},
            {"L", f.grid().half_period},
            {"channels", f.channels()},
            {"samples", std::move(samples)}};
}

Field from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string{}) != "ellreg-field") throw FormatError("JSON is not an ellreg-field");
        if (j.at("version").get<std::uint32_t>() != kVersion) throw FormatError("unsupported field JSON version");
        GridSpec g(j.at("m").get<int>(), j.at("N").get<int>(), j.at("L").get<double>());
        const int channels = j.at("channels").get<int>();
        const auto& s = j.at("samples");
        if (s.size() != g.size() * static_cast<std::size_t>(channels)) throw FormatError("sample count mismatch");
        std::vector<cplx> data;
        data.reserve(s.size());
        for (const auto& z : s) {
            if (z.is_number()) data.emplace_back(z.get<double>(), 0.0);
            else data.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        }
        return Field(g, channels, std::move(data));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field JSON: ") + e.what());
    }
}

} // namespace ellreg::io
