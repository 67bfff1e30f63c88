#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "radsum/corpus.hpp"
#include "radsum/text.hpp"

namespace radsum {

struct RougeTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  /// f1 = 2pr/(p+r), or 0 when p+r is 0.
  static RougeTriple from(double precision, double recall);
};

// All lexical metrics lowercase their inputs. With stem set, every token on
// both sides is replaced by its Porter stem before matching.

RougeTriple rouge_n(const TokenSequence& cand, const TokenSequence& ref, int n, bool stem);
RougeTriple rouge_l(const TokenSequence& cand, const TokenSequence& ref, bool stem);

/// Summary-level LCS: both texts are sentence split, each reference sentence
/// takes the union of its LCS hits against every candidate sentence, and hits
/// are clipped by token counts so nothing is credited twice.
RougeTriple rouge_lsum(std::string_view cand, std::string_view ref, bool stem);

enum class BleuSmoothing { none, add1 };

const char* to_string(BleuSmoothing s);
BleuSmoothing parse_smoothing(std::string_view name);

struct SegmentPair {
  TokenSequence cand;
  TokenSequence ref;
};

/// Sufficient statistics of corpus BLEU; additive over segments.
struct BleuStats {
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;
  std::vector<std::size_t> correct;
  std::vector<std::size_t> total;

  explicit BleuStats(int max_n = 4) : correct(max_n, 0), total(max_n, 0) {}
  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(const TokenSequence& cand, const TokenSequence& ref, int max_n = 4);

/// Score in [0, 1] from accumulated statistics. Orders whose candidate
/// n-gram total is zero are left out of the geometric mean; add1 adds one to
/// the numerator and denominator of every order n >= 2 before that check.
double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing);

/// Corpus BLEU over clipped n-gram counts with a brevity penalty.
double bleu(std::span<const SegmentPair> pairs, int max_n = 4, BleuSmoothing smoothing = BleuSmoothing::none);

/// Word groups for METEOR's third matching stage. Two words are synonyms
/// when they appear together in at least one group.
class SynonymLexicon {
 public:
  /// One whitespace-separated group per line, '#' comments.
  static SynonymLexicon parse(std::istream& in);
  static SynonymLexicon load(const std::filesystem::path& path);

  void add_group(const std::vector<std::string>& words);
  bool synonyms(const std::string& a, const std::string& b) const;
  bool empty() const { return groups_of_.empty(); }

 private:
  std::unordered_map<std::string, std::vector<std::size_t>> groups_of_;
  std::size_t group_count_ = 0;
};

struct MeteorAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (cand, ref), sorted by cand
  std::size_t chunks = 0;
  double score = 0.0;
};

/// Staged unigram alignment (exact, Porter stem, then synonyms when a lexicon
/// is given), greedy left to right. Within a stage a candidate token prefers
/// the reference slot that extends the previous match, then a slot whose
/// successor also matches the next candidate token, then the leftmost slot.
/// Fmean = 10PR/(R+9P), penalty = 0.5 (chunks/matches)^3.
MeteorAlignment meteor_align(const TokenSequence& cand, const TokenSequence& ref,
                             const SynonymLexicon* synonyms = nullptr);
double meteor(const TokenSequence& cand, const TokenSequence& ref, const SynonymLexicon* synonyms = nullptr);

/// Token embeddings for one record, produced by an external encoder.
struct EmbeddingRecord {
  std::string id;
  std::vector<std::string> ref_tokens;
  Eigen::MatrixXd ref_vectors;  // |ref_tokens| x d
  std::vector<std::string> cand_tokens;
  Eigen::MatrixXd cand_vectors;  // |cand_tokens| x d
};

/// Throws Parse when rows, token counts or widths disagree or an entry is not finite.
void validate(const EmbeddingRecord& rec);

std::vector<EmbeddingRecord> parse_embeddings(std::istream& in);
std::vector<EmbeddingRecord> load_embeddings(const std::filesystem::path& path);

/// Mean over reference rows of the best cosine similarity to any candidate
/// row. No IDF weighting, no baseline rescaling.
double bertscore_recall(const EmbeddingRecord& rec);

struct ScoreBundle {
  RougeTriple rouge1;
  RougeTriple rouge2;
  RougeTriple rougeL;
  RougeTriple rougeLsum;
  double bleu = 0.0;
  double meteor = 0.0;
  std::optional<double> bertscore_recall;
};

struct ScoreConfig {
  bool stem = true;
  BleuSmoothing smoothing = BleuSmoothing::none;
  const SynonymLexicon* synonyms = nullptr;
};

struct RecordScore {
  std::string id;
  ScoreBundle scores;  // bleu here is sentence-level
};

struct CorpusScores {
  std::vector<RecordScore> per_record;  // sorted by id
  ScoreBundle aggregate;                // means, except corpus-level BLEU
};

ScoreBundle score_pair(std::string_view prediction, std::string_view reference, const ScoreConfig& config);

using PredictionMap = std::map<std::string, std::string>;

PredictionMap parse_predictions(std::istream& in);
PredictionMap load_predictions(const std::filesystem::path& path);

/// Scores every reference of the split against its prediction. Throws
/// IdMismatch listing missing and unknown ids. When embeddings are given,
/// each scored id needs a record.
CorpusScores score_corpus(const PredictionMap& predictions, const Corpus& references, Split split,
                          const std::vector<EmbeddingRecord>* embeddings, const ScoreConfig& config);

}  // namespace radsum
