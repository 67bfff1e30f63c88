#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace radsum::cli {

// Bad flags or config values. Maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "key = value" lines, '#' comments, blank lines ignored. Keys are stored
/// with '_' folded to '-' so either spelling matches a flag name.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

std::string fold_key(std::string key);

struct ParamSpec {
  std::string name;  // flag name without dashes, also the config key
  std::string fallback;
  std::string help;
  bool required = false;
};

/// Effective parameter values: a flag given on the command line wins over the
/// config file, which wins over the built-in default.
class Params {
 public:
  void set(const std::string& name, std::string value) { values_[name] = std::move(value); }
  bool has(const std::string& name) const;

  const std::string& text(const std::string& name) const;
  std::optional<std::string> optional_text(const std::string& name) const;
  double real(const std::string& name) const;
  long integer(const std::string& name) const;
  bool flag(const std::string& name) const;
  std::vector<double> reals(const std::string& name) const;  // comma separated

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace radsum::cli
