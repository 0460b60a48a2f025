#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cvbell {

inline constexpr const char* kToolName = "cvbell";
inline constexpr const char* kToolVersion = "0.1.0";

/// Full-precision text form used by the CLI ("%#.16g": 16 significant digits,
/// trailing zeros kept, locale-independent).
std::string format_full(double value);

/// 15-significant-digit form used in CSV cells.
std::string format_csv(double value);

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

std::string utc_timestamp();

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Everything needed to reproduce a CLI run: command name, the complete
/// parameter set, tool version, timestamp and a checksum per output file.
/// The timestamp lives only here, never in the outputs, so re-running from a
/// manifest reproduces the outputs byte-identically.
struct RunManifest {
  std::string command;
  nlohmann::json parameters;
  std::string version = kToolVersion;
  std::string timestamp;
  nlohmann::json output_checksums;  // filename -> fnv1a64 hex of contents

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  /// Records the checksum and writes the file.
  void add_output(const std::string& path, const std::string& content);
  void save(const std::string& path) const;
};

}  // namespace cvbell
