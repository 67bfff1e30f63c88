#include "radsum/diagnosis.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "radsum/error.hpp"
#include "radsum/text.hpp"

namespace radsum {
namespace {

constexpr std::array<std::string_view, 4> kHeadNouns = {"abnormality", "disease", "process", "findings"};
constexpr std::array<std::string_view, 7> kContrastive = {"but",  "however", "except", "although",
                                                          "though", "otherwise", "with"};
constexpr std::size_t kMaxTemplateBody = 8;

bool is_head(std::string_view w) {
  return std::find(kHeadNouns.begin(), kHeadNouns.end(), w) != kHeadNouns.end();
}

bool is_contrastive(std::string_view w) {
  return std::find(kContrastive.begin(), kContrastive.end(), w) != kContrastive.end();
}

std::vector<std::string> split_words(const std::string& normalized) {
  std::vector<std::string> words;
  std::istringstream in(normalized);
  for (std::string w; in >> w;) words.push_back(std::move(w));
  return words;
}

// words[begin, end) is "no ... head" with a clean body.
bool matches_template(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  if (end - begin < 2) return false;
  if (words[begin] != "no" || !is_head(words[end - 1])) return false;
  if (end - begin - 2 > kMaxTemplateBody) return false;
  for (std::size_t i = begin + 1; i + 1 < end; ++i) {
    if (is_head(words[i]) || is_contrastive(words[i])) return false;
  }
  return true;
}

}  // namespace

std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char raw : text) {
    auto c = static_cast<unsigned char>(raw);
    if (std::ispunct(c) || is_space(raw)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

const std::vector<std::string>& NegationLexicon::seeds() {
  static const std::vector<std::string> seed_list = {
      "no acute cardiopulmonary abnormality",
      "no active disease",
      "no acute radiographic cardiopulmonary process",
  };
  return seed_list;
}

NegationLexicon::NegationLexicon() {
  for (const auto& s : seeds()) add(s);
}

void NegationLexicon::add(std::string_view pattern) {
  std::string norm = normalize(pattern);
  if (norm.empty() || index_.count(norm)) return;
  index_.insert(norm);
  patterns_.push_back(std::move(norm));
}

NegationLexicon NegationLexicon::parse(std::istream& in) {
  NegationLexicon lex;
  for (std::string line; std::getline(in, line);) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    lex.add(body);
  }
  return lex;
}

NegationLexicon NegationLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open lexicon file: " + path.string());
  return parse(in);
}

const char* to_string(DiagnosisClass c) {
  return c == DiagnosisClass::negated ? "negated" : "diagnosis";
}

DiagnosisClass classify(std::string_view text, const NegationLexicon& lexicon) {
  const std::string norm = normalize(text);
  if (norm.empty()) return DiagnosisClass::diagnosis;
  if (lexicon.contains(norm)) return DiagnosisClass::negated;

  const auto words = split_words(norm);
  const std::size_t n = words.size();
  // reachable[i]: words[0, i) splits into valid negative segments.
  std::vector<bool> reachable(n + 1, false);
  reachable[0] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reachable[i]) continue;
    std::string segment;
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (j > i + 1) segment += ' ';
      segment += words[j - 1];
      if (lexicon.contains(segment) || matches_template(words, i, j)) reachable[j] = true;
    }
  }
  return reachable[n] ? DiagnosisClass::negated : DiagnosisClass::diagnosis;
}

namespace {

void check_same_ids(const TextById& predictions, const TextById& references) {
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto& [id, _] : references) {
    if (!predictions.count(id)) missing.push_back(id);
  }
  for (const auto& [id, _] : predictions) {
    if (!references.count(id)) extra.push_back(id);
  }
  if (missing.empty() && extra.empty()) return;
  std::string msg = "id mismatch between predictions and references";
  if (!missing.empty()) msg += "; missing predictions: " + join(missing, ", ");
  if (!extra.empty()) msg += "; unknown ids: " + join(extra, ", ");
  throw Error(ErrorKind::IdMismatch, msg);
}

}  // namespace

ConfusionReport confusion(const TextById& predictions, const TextById& references,
                          const NegationLexicon& lexicon) {
  check_same_ids(predictions, references);
  ConfusionReport report;
  auto& c = report.counts;
  for (const auto& [id, ref_text] : references) {
    bool truth = classify(ref_text, lexicon) == DiagnosisClass::negated;
    bool pred = classify(predictions.at(id), lexicon) == DiagnosisClass::negated;
    if (pred && truth) ++c.tp;
    else if (pred && !truth) ++c.fp;
    else if (!pred && truth) ++c.fn;
    else ++c.tn;
  }
  report.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  report.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  return report;
}

BaselineScores dummy_baseline(const TextById& references, const NegationLexicon& lexicon) {
  if (references.empty()) throw Error(ErrorKind::EmptyInput, "dummy_baseline: no references");
  std::size_t negated = 0;
  for (const auto& [id, text] : references) {
    if (classify(text, lexicon) == DiagnosisClass::negated) ++negated;
  }
  BaselineScores b;
  b.precision = static_cast<double>(negated) / static_cast<double>(references.size());
  b.recall = negated ? 1.0 : 0.0;
  return b;
}

}  // namespace radsum
