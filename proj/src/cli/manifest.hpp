#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cli/output.hpp"

namespace radsum::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> input_digests;  // (path, sha256)
  std::string timestamp;                                          // UTC, ISO 8601
};

/// config_hash is the SHA-256 of the effective config rendered as JSON.
RunManifest make_manifest(const std::string& command, const Json& effective_config,
                          const std::vector<std::filesystem::path>& inputs);

Json to_json(const RunManifest& m);

std::string utc_now();

}  // namespace radsum::cli
