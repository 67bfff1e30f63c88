#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "radsum/text.hpp"

namespace radsum::cli {

std::string fold_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile cfg;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = fold_key(std::string(trim(body.substr(0, eq))));
    std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    if (cfg.entries_.count(key)) throw UsageError("config line " + std::to_string(line_no) + ": duplicate key " + key);
    cfg.entries_[key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  return parse(in);
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool Params::has(const std::string& name) const {
  auto it = values_.find(name);
  return it != values_.end() && !it->second.empty();
}

const std::string& Params::text(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw UsageError("internal: unknown parameter " + name);
  return it->second;
}

std::optional<std::string> Params::optional_text(const std::string& name) const {
  if (!has(name)) return std::nullopt;
  return text(name);
}

double Params::real(const std::string& name) const {
  const std::string& s = text(name);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("--" + name + ": \"" + s + "\" is not a number");
  }
  return v;
}

long Params::integer(const std::string& name) const {
  const std::string& s = text(name);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("--" + name + ": \"" + s + "\" is not an integer");
  }
  return v;
}

bool Params::flag(const std::string& name) const {
  const std::string s = to_lower(text(name));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw UsageError("--" + name + ": \"" + s + "\" is not a boolean");
}

std::vector<double> Params::reals(const std::string& name) const {
  std::vector<double> out;
  std::string_view s = text(name);
  while (!s.empty()) {
    auto comma = s.find(',');
    std::string_view part = trim(s.substr(0, comma));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw UsageError("--" + name + ": \"" + std::string(part) + "\" is not a number");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace radsum::cli
