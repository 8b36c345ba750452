#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qrb {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// FNV-1a 64-bit content digest, hex-encoded. Bookkeeping, not
/// cryptography.
inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ManifestFile {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string digest;
};

/// Reproducibility record for one study run: config echo, version,
/// timestamps, seed and the emitted-file inventory with digests.
struct RunManifest {
  nlohmann::json config_echo;
  std::string version = kArtifactVersion;
  std::string started_at;
  std::string finished_at;
  std::uint64_t seed = 0;
  std::vector<ManifestFile> files;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = config_echo;
    j["version"] = version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["seed"] = seed;
    nlohmann::json files_json = nlohmann::json::array();
    for (const auto& f : files) {
      nlohmann::json fj;
      fj["path"] = f.path;
      fj["bytes"] = f.bytes;
      fj["digest"] = f.digest;
      files_json.push_back(std::move(fj));
    }
    j["files"] = std::move(files_json);
    return j;
  }
};

inline std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace qrb
