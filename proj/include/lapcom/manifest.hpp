#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace lapcom {

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a 64-bit digest, stable across platforms.
inline std::string digest_bytes(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string digest_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot digest missing file: " + p.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return digest_bytes(bytes);
}

/// Digest of a directory: file names and contents, in sorted order.
inline std::string digest_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::string combined;
  for (const auto& f : files) {
    combined += std::filesystem::relative(f, dir).string();
    combined += ':';
    combined += digest_file(f);
    combined += '\n';
  }
  return digest_bytes(combined);
}

/// Provenance record written next to every command's outputs. Digests are
/// recomputed and compared when a downstream command consumes the artifact.
struct RunManifest {
  std::string command;
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string data_digest;
  nlohmann::json inputs = nlohmann::json::object();  // upstream manifest digests
  std::vector<std::string> artifacts;
  double elapsed_seconds = 0.0;
};

inline void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"command", m.command},     {"version", m.version},
                     {"seed", m.seed},           {"config_digest", m.config_digest},
                     {"data_digest", m.data_digest}, {"inputs", m.inputs},
                     {"artifacts", m.artifacts}, {"elapsed_seconds", m.elapsed_seconds}};
}
inline void from_json(const nlohmann::json& j, RunManifest& m) {
  j.at("command").get_to(m.command);
  j.at("version").get_to(m.version);
  j.at("seed").get_to(m.seed);
  j.at("config_digest").get_to(m.config_digest);
  j.at("data_digest").get_to(m.data_digest);
  m.inputs = j.at("inputs");
  j.at("artifacts").get_to(m.artifacts);
  j.at("elapsed_seconds").get_to(m.elapsed_seconds);
}

inline void save_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  nlohmann::json j;
  to_json(j, m);
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

inline RunManifest load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("missing manifest: " + (dir / "manifest.json").string());
  RunManifest m;
  from_json(nlohmann::json::parse(in), m);
  return m;
}

}  // namespace lapcom
