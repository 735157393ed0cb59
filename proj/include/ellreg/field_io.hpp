#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "ellreg/grid.hpp"

namespace ellreg::io {

// Binary layout (all little-endian):
//   "ELRF" | u32 version=1 | u32 byte-order mark 0x01020304 | u32 m | u32 N |
//   f64 L | u32 channels | u32 reserved=0 | N^m*channels pairs of f64 (re, im)
// Samples are row-major over grid points with channels innermost.
void write_binary(std::ostream& os, const Field& f);
Field read_binary(std::istream& is);

void save(const std::filesystem::path& path, const Field& f);
/// Dispatches on content: binary if the file starts with the magic, JSON otherwise.
Field load(const std::filesystem::path& path);

nlohmann::json to_json(const Field& f);
Field from_json(const nlohmann::json& j);

} // namespace ellreg::io
