#include "cvbell/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvbell {

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.16g", value);
  return buf;
}

std::string format_csv(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"tool", kToolName},
                        {"version", version},
                        {"command", command},
                        {"timestamp", timestamp},
                        {"parameters", parameters},
                        {"outputs", output_checksums}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.parameters = j.at("parameters");
  m.version = j.value("version", std::string{});
  m.timestamp = j.value("timestamp", std::string{});
  m.output_checksums = j.value("outputs", nlohmann::json::object());
  return m;
}

void RunManifest::add_output(const std::string& path, const std::string& content) {
  write_text_file(path, content);
  output_checksums[path] = fnv1a64_hex(content);
}

void RunManifest::save(const std::string& path) const {
  write_text_file(path, to_json().dump(2) + "\n");
}

}  // namespace cvbell
