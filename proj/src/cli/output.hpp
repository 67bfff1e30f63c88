#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

namespace radsum::cli {

using Json = nlohmann::ordered_json;

/// Writes to a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Rounds every floating-point number to six decimals (and -0 to 0), then
/// pretty-prints with a trailing newline.
std::string render_json(Json doc);

/// Maps a run id onto a safe file-name stem.
std::string file_stem(const std::string& id);

}  // namespace radsum::cli
