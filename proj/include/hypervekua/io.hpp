#pragma once

// Text serialization helpers shared by the library and the CLI.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "hypervekua/hyperbolic.hpp"

namespace hypervekua {

/// Shortest round-trip-safe decimal for doubles: 17 significant digits.
std::string format_real(double value);

/// Parses a decimal real (surrounding whitespace allowed). Throws FormatError.
double parse_real(std::string_view text);

/// "re,im" with 17 significant digits.
std::string format_csv_pair(const hnum& z);
/// Parses "re,im" (whitespace tolerated). Throws FormatError.
hnum parse_csv_pair(std::string_view text);

template <typename S>
void to_json(nlohmann::json& j, const Hyperbolic<S>& z) {
  j = nlohmann::json::array({z.re, z.im});
}

template <typename S>
void from_json(const nlohmann::json& j, Hyperbolic<S>& z) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError("expected a [re, im] pair, got " + j.dump());
  }
  z.re = j[0].get<S>();
  z.im = j[1].get<S>();
}

/// Write via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// git-style object id: SHA-1 of "blob <size>\0<content>", lowercase hex.
std::string git_blob_hash(std::string_view content);

}  // namespace hypervekua
