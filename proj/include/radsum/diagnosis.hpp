#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace radsum {

/// Lowercase, replace ASCII punctuation with spaces, collapse whitespace, trim.
std::string normalize(std::string_view text);

/// Normalized phrases that denote a negated cardiopulmonary diagnosis.
/// Always contains the three seed phrases.
class NegationLexicon {
 public:
  NegationLexicon();  // seed phrases only

  /// One pattern per line; blank lines and '#' comments are skipped. Lines
  /// are normalized on load.
  static NegationLexicon parse(std::istream& in);
  static NegationLexicon load(const std::filesystem::path& path);

  void add(std::string_view pattern);
  bool contains(std::string_view normalized) const { return index_.count(std::string(normalized)) != 0; }
  const std::vector<std::string>& patterns() const { return patterns_; }

  static const std::vector<std::string>& seeds();

 private:
  std::vector<std::string> patterns_;
  std::unordered_set<std::string> index_;
};

enum class DiagnosisClass { negated, diagnosis };

const char* to_string(DiagnosisClass c);

/// Negated iff the normalized text can be cut into consecutive segments that
/// are each a lexicon pattern or the generic template
/// "no <up to 8 words> (abnormality|disease|process|findings)". Template
/// bodies may not contain a head noun or a contrastive word, so a trailing
/// positive finding such as "no acute disease stable cardiomegaly" fails.
/// Empty text is a diagnosis.
DiagnosisClass classify(std::string_view text, const NegationLexicon& lexicon);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct ConfusionReport {
  ConfusionCounts counts;
  double precision = 0.0;
  double recall = 0.0;
};

using TextById = std::map<std::string, std::string>;

/// Positive class is the negated diagnosis. Throws IdMismatch when the id sets differ.
ConfusionReport confusion(const TextById& predictions, const TextById& references,
                          const NegationLexicon& lexicon);

struct BaselineScores {
  double precision = 0.0;
  double recall = 0.0;
};

/// Always-negated classifier: precision is the negated prevalence, recall is
/// 1 (0 when no reference is negated).
BaselineScores dummy_baseline(const TextById& references, const NegationLexicon& lexicon);

}  // namespace radsum
