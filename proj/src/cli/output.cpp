#include "cli/output.hpp"

#include <cmath>
#include <fstream>
#include <unistd.h>

#include "radsum/error.hpp"

namespace radsum::cli {
namespace {

void round_numbers(Json& node) {
  if (node.is_number_float()) {
    double v = std::round(node.get<double>() * 1e6) / 1e6;
    if (v == 0.0) v = 0.0;
    node = v;
  } else if (node.is_structured()) {
    for (auto& child : node) round_numbers(child);
  }
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::Io, "cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

std::string render_json(Json doc) {
  round_numbers(doc);
  return doc.dump(2) + "\n";
}

std::string file_stem(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                    c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

}  // namespace radsum::cli
