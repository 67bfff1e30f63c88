#include "radsum/corpus.hpp"

#include <array>
#include <fstream>
#include <json.hpp>
#include <map>
#include <unordered_set>

#include "radsum/csv.hpp"
#include "radsum/error.hpp"
#include "radsum/text.hpp"

namespace radsum {
namespace {

constexpr std::array<const char*, 4> kFields = {"id", "findings", "impression", "split"};

std::string location(std::size_t line) { return "line " + std::to_string(line); }

ReportRecord make_record(const std::map<std::string, std::string>& fields, std::size_t line) {
  for (const char* name : kFields) {
    auto it = fields.find(name);
    if (it == fields.end()) {
      throw Error(ErrorKind::MissingField, location(line) + ": missing field \"" + name + "\"");
    }
    if (trim(it->second).empty()) {
      throw Error(ErrorKind::MissingField, location(line) + ": field \"" + name + "\" is empty");
    }
  }
  ReportRecord r;
  r.id = fields.at("id");
  r.findings = fields.at("findings");
  r.impression = fields.at("impression");
  try {
    r.split = parse_split(fields.at("split"));
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, location(line) + ": " + e.what());
  }
  return r;
}

void check_unique(const Corpus& corpus) {
  std::unordered_set<std::string> seen;
  for (const auto& r : corpus) {
    if (!seen.insert(r.id).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate record id \"" + r.id + "\"");
    }
  }
}

}  // namespace

const char* to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  throw Error(ErrorKind::InvalidArgument, "unknown split \"" + std::string(name) + "\"");
}

CorpusFormat format_for(const std::filesystem::path& path) {
  return to_lower(path.extension().string()) == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

Corpus parse_corpus_jsonl(std::istream& in) {
  Corpus corpus;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Parse, location(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error(ErrorKind::Parse, location(line_no) + ": expected a JSON object");
    std::map<std::string, std::string> fields;
    for (const char* name : kFields) {
      auto it = obj.find(name);
      if (it == obj.end() || it->is_null()) continue;
      if (!it->is_string()) {
        throw Error(ErrorKind::Parse, location(line_no) + ": field \"" + name + "\" must be a string");
      }
      fields[name] = it->get<std::string>();
    }
    corpus.push_back(make_record(fields, line_no));
  }
  check_unique(corpus);
  return corpus;
}

Corpus parse_corpus_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) return {};
  const auto& header = rows.front().fields;
  Corpus corpus;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw Error(ErrorKind::Parse, location(row.line) + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(row.fields.size()));
    }
    std::map<std::string, std::string> fields;
    for (std::size_t c = 0; c < header.size(); ++c) fields[header[c]] = row.fields[c];
    corpus.push_back(make_record(fields, row.line));
  }
  check_unique(corpus);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open corpus file: " + path.string());
  return format == CorpusFormat::csv ? parse_corpus_csv(in) : parse_corpus_jsonl(in);
}

Corpus load_corpus(const std::filesystem::path& path) { return load_corpus(path, format_for(path)); }

Corpus records_in_split(const Corpus& corpus, Split split) {
  Corpus out;
  for (const auto& r : corpus) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

std::size_t word_token_count(std::string_view text) { return word_tokenize(text).size(); }

CleanResult clean_corpus(const Corpus& corpus) {
  CleanResult result;
  for (const auto& r : corpus) {
    std::size_t f = word_token_count(r.findings);
    std::size_t i = word_token_count(r.impression);
    if (i > f) {
      result.excluded.push_back({r.id, f, i});
    } else {
      result.retained.push_back(r);
    }
  }
  return result;
}

double negation_prevalence(const Corpus& corpus, Split split, const NegationLexicon& lexicon) {
  std::size_t total = 0;
  std::size_t negated = 0;
  for (const auto& r : corpus) {
    if (r.split != split) continue;
    ++total;
    if (classify(r.impression, lexicon) == DiagnosisClass::negated) ++negated;
  }
  if (total == 0) {
    throw Error(ErrorKind::EmptyInput, std::string("split \"") + to_string(split) + "\" is empty");
  }
  return static_cast<double>(negated) / static_cast<double>(total);
}

}  // namespace radsum
