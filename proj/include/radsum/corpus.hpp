#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "radsum/diagnosis.hpp"

namespace radsum {

enum class Split { train, validation, test };

const char* to_string(Split split);
Split parse_split(std::string_view name);

/// One findings/impression pair. Ids are unique within a corpus; findings and
/// impression are non-empty after trimming.
struct ReportRecord {
  std::string id;
  std::string findings;
  std::string impression;
  Split split = Split::train;

  bool operator==(const ReportRecord&) const = default;
};

using Corpus = std::vector<ReportRecord>;

enum class CorpusFormat { jsonl, csv };

/// .csv selects CSV, anything else JSONL.
CorpusFormat format_for(const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus_jsonl(std::istream& in);
Corpus parse_corpus_csv(std::istream& in);

Corpus records_in_split(const Corpus& corpus, Split split);

struct Exclusion {
  std::string id;
  std::size_t findings_tokens = 0;
  std::size_t impression_tokens = 0;
};

struct CleanResult {
  Corpus retained;
  std::vector<Exclusion> excluded;
};

/// Drops records whose impression has more word tokens than its findings.
CleanResult clean_corpus(const Corpus& corpus);

std::size_t word_token_count(std::string_view text);

/// Fraction of the split's impressions classified as negated diagnoses.
double negation_prevalence(const Corpus& corpus, Split split, const NegationLexicon& lexicon);

}  // namespace radsum
