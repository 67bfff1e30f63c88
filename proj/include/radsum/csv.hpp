#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace radsum::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: comma separated, double-quoted fields may contain commas,
/// newlines and "" escapes. Throws Error(Parse) with the line number on an
/// unterminated quote.
std::vector<Row> read(std::istream& in);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Fixed six-decimal rendering used for every real number we emit.
std::string fixed6(double value);

}  // namespace radsum::csv
