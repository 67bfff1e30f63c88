#include "cli/manifest.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <openssl/evp.h>

#include "radsum/error.hpp"

namespace radsum::cli {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const std::string& command, const Json& effective_config,
                          const std::vector<std::filesystem::path>& inputs) {
  RunManifest m;
  m.command = command;
  m.config_hash = sha256_hex(effective_config.dump());
  for (const auto& p : inputs) m.input_digests.emplace_back(p.string(), sha256_file(p));
  m.timestamp = utc_now();
  return m;
}

Json to_json(const RunManifest& m) {
  Json digests = Json::array();
  for (const auto& [path, hash] : m.input_digests) digests.push_back({{"path", path}, {"sha256", hash}});
  return Json{{"tool_version", m.tool_version},
              {"command", m.command},
              {"config_hash", m.config_hash},
              {"input_digests", digests},
              {"timestamp", m.timestamp}};
}

}  // namespace radsum::cli
