#include "radsum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "radsum/error.hpp"
#include "radsum/porter.hpp"

namespace radsum {
namespace {

using Tokens = std::vector<std::string>;

Tokens prepare(const TokenSequence& seq, bool stem) {
  Tokens out;
  out.reserve(seq.size());
  for (const auto& t : seq.tokens) out.push_back(stem ? porter_stem(t) : to_lower(t));
  return out;
}

std::map<std::string, std::size_t> ngram_counts(const Tokens& tokens, int n) {
  std::map<std::string, std::size_t> counts;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < order; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t clipped_overlap(const std::map<std::string, std::size_t>& a,
                            const std::map<std::string, std::size_t>& b) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : a) {
    auto it = b.find(gram);
    if (it != b.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

std::size_t sum_counts(const std::map<std::string, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  return total;
}

using LcsTable = std::vector<std::vector<std::size_t>>;

LcsTable lcs_table(const Tokens& ref, const Tokens& cand) {
  LcsTable t(ref.size() + 1, std::vector<std::size_t>(cand.size() + 1, 0));
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    for (std::size_t j = 1; j <= cand.size(); ++j) {
      t[i][j] = ref[i - 1] == cand[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t;
}

// Reference positions of one LCS; ties prefer moving up in the reference.
std::vector<std::size_t> lcs_ref_indices(const Tokens& ref, const Tokens& cand) {
  auto t = lcs_table(ref, cand);
  std::vector<std::size_t> idx;
  std::size_t i = ref.size();
  std::size_t j = cand.size();
  while (i > 0 && j > 0) {
    if (ref[i - 1] == cand[j - 1]) {
      idx.push_back(i - 1);
      --i;
      --j;
    } else if (t[i][j - 1] > t[i - 1][j]) {
      --j;
    } else {
      --i;
    }
  }
  std::reverse(idx.begin(), idx.end());
  return idx;
}

Tokens tokens_for_sentence(std::string_view sentence, bool stem) {
  return prepare(word_tokenize(sentence), stem);
}

}  // namespace

RougeTriple RougeTriple::from(double precision, double recall) {
  RougeTriple t{precision, recall, 0.0};
  if (precision + recall > 0.0) t.f1 = 2.0 * precision * recall / (precision + recall);
  return t;
}

RougeTriple rouge_n(const TokenSequence& cand, const TokenSequence& ref, int n, bool stem) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "rouge_n: order must be at least 1");
  auto c = ngram_counts(prepare(cand, stem), n);
  auto r = ngram_counts(prepare(ref, stem), n);
  const std::size_t cand_total = sum_counts(c);
  const std::size_t ref_total = sum_counts(r);
  if (cand_total == 0 || ref_total == 0) return {};
  const auto overlap = static_cast<double>(clipped_overlap(c, r));
  return RougeTriple::from(overlap / static_cast<double>(cand_total), overlap / static_cast<double>(ref_total));
}

RougeTriple rouge_l(const TokenSequence& cand, const TokenSequence& ref, bool stem) {
  auto c = prepare(cand, stem);
  auto r = prepare(ref, stem);
  if (c.empty() || r.empty()) return {};
  const auto lcs = static_cast<double>(lcs_table(r, c).back().back());
  return RougeTriple::from(lcs / static_cast<double>(c.size()), lcs / static_cast<double>(r.size()));
}

RougeTriple rouge_lsum(std::string_view cand, std::string_view ref, bool stem) {
  std::vector<Tokens> ref_sents;
  std::vector<Tokens> cand_sents;
  for (const auto& s : sentence_split(ref)) ref_sents.push_back(tokens_for_sentence(s, stem));
  for (const auto& s : sentence_split(cand)) cand_sents.push_back(tokens_for_sentence(s, stem));
  if (ref_sents.empty() || cand_sents.empty()) return {};

  std::size_t ref_len = 0;
  std::size_t cand_len = 0;
  std::map<std::string, std::size_t> ref_counts;
  std::map<std::string, std::size_t> cand_counts;
  for (const auto& s : ref_sents) {
    ref_len += s.size();
    for (const auto& t : s) ++ref_counts[t];
  }
  for (const auto& s : cand_sents) {
    cand_len += s.size();
    for (const auto& t : s) ++cand_counts[t];
  }
  if (ref_len == 0 || cand_len == 0) return {};

  std::size_t hits = 0;
  for (const auto& r : ref_sents) {
    std::vector<std::size_t> union_idx;
    for (const auto& c : cand_sents) {
      auto idx = lcs_ref_indices(r, c);
      union_idx.insert(union_idx.end(), idx.begin(), idx.end());
    }
    std::sort(union_idx.begin(), union_idx.end());
    union_idx.erase(std::unique(union_idx.begin(), union_idx.end()), union_idx.end());
    for (std::size_t i : union_idx) {
      const auto& tok = r[i];
      auto& rc = ref_counts[tok];
      auto& cc = cand_counts[tok];
      if (rc > 0 && cc > 0) {
        ++hits;
        --rc;
        --cc;
      }
    }
  }
  const auto h = static_cast<double>(hits);
  return RougeTriple::from(h / static_cast<double>(cand_len), h / static_cast<double>(ref_len));
}

// --- BLEU -----------------------------------------------------------------

const char* to_string(BleuSmoothing s) { return s == BleuSmoothing::add1 ? "add1" : "none"; }

BleuSmoothing parse_smoothing(std::string_view name) {
  if (name == "none") return BleuSmoothing::none;
  if (name == "add1") return BleuSmoothing::add1;
  throw Error(ErrorKind::InvalidArgument, "unknown smoothing \"" + std::string(name) + "\" (none|add1)");
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  cand_len += other.cand_len;
  ref_len += other.ref_len;
  for (std::size_t n = 0; n < correct.size() && n < other.correct.size(); ++n) {
    correct[n] += other.correct[n];
    total[n] += other.total[n];
  }
  return *this;
}

BleuStats bleu_stats(const TokenSequence& cand, const TokenSequence& ref, int max_n) {
  BleuStats s(max_n);
  auto c = prepare(cand, false);
  auto r = prepare(ref, false);
  s.cand_len = c.size();
  s.ref_len = r.size();
  for (int n = 1; n <= max_n; ++n) {
    auto cc = ngram_counts(c, n);
    auto rc = ngram_counts(r, n);
    s.total[n - 1] = sum_counts(cc);
    s.correct[n - 1] = clipped_overlap(cc, rc);
  }
  return s;
}

double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing) {
  if (stats.cand_len == 0) return 0.0;
  const bool any_match = std::any_of(stats.correct.begin(), stats.correct.end(), [](auto c) { return c > 0; });
  if (!any_match) return 0.0;

  double bp = 1.0;
  if (stats.cand_len < stats.ref_len) {
    bp = std::exp(1.0 - static_cast<double>(stats.ref_len) / static_cast<double>(stats.cand_len));
  }

  double log_sum = 0.0;
  std::size_t order = 0;
  for (std::size_t n = 0; n < stats.total.size(); ++n) {
    auto correct = static_cast<double>(stats.correct[n]);
    auto total = static_cast<double>(stats.total[n]);
    if (smoothing == BleuSmoothing::add1 && n > 0) {
      correct += 1.0;
      total += 1.0;
    }
    if (total == 0.0) break;
    if (correct == 0.0) return 0.0;
    log_sum += std::log(correct / total);
    ++order;
  }
  return bp * std::exp(log_sum / static_cast<double>(order));
}

double bleu(std::span<const SegmentPair> pairs, int max_n, BleuSmoothing smoothing) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "bleu: empty corpus");
  if (max_n < 1) throw Error(ErrorKind::InvalidArgument, "bleu: max_n must be at least 1");
  BleuStats total(max_n);
  for (const auto& p : pairs) total += bleu_stats(p.cand, p.ref, max_n);
  return bleu_from_stats(total, smoothing);
}

// --- METEOR ---------------------------------------------------------------

SynonymLexicon SynonymLexicon::parse(std::istream& in) {
  SynonymLexicon lex;
  for (std::string line; std::getline(in, line);) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream words{std::string(body)};
    std::vector<std::string> group;
    for (std::string w; words >> w;) group.push_back(w);
    lex.add_group(group);
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open synonym file: " + path.string());
  return parse(in);
}

void SynonymLexicon::add_group(const std::vector<std::string>& words) {
  if (words.size() < 2) return;
  const std::size_t g = group_count_++;
  for (const auto& w : words) groups_of_[to_lower(w)].push_back(g);
}

bool SynonymLexicon::synonyms(const std::string& a, const std::string& b) const {
  auto ia = groups_of_.find(a);
  auto ib = groups_of_.find(b);
  if (ia == groups_of_.end() || ib == groups_of_.end()) return false;
  for (std::size_t g : ia->second) {
    if (std::find(ib->second.begin(), ib->second.end(), g) != ib->second.end()) return true;
  }
  return false;
}

MeteorAlignment meteor_align(const TokenSequence& cand_seq, const TokenSequence& ref_seq,
                             const SynonymLexicon* synonyms) {
  const Tokens cand = prepare(cand_seq, false);
  const Tokens ref = prepare(ref_seq, false);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cand_match(cand.size(), kNone);
  std::vector<bool> ref_used(ref.size(), false);

  Tokens cand_stem;
  Tokens ref_stem;
  for (const auto& t : cand) cand_stem.push_back(porter_stem(t));
  for (const auto& t : ref) ref_stem.push_back(porter_stem(t));

  using Matcher = std::function<bool(std::size_t, std::size_t)>;
  std::vector<Matcher> stages = {
      [&](std::size_t i, std::size_t r) { return cand[i] == ref[r]; },
      [&](std::size_t i, std::size_t r) { return cand_stem[i] == ref_stem[r]; },
  };
  if (synonyms && !synonyms->empty()) {
    stages.emplace_back([&](std::size_t i, std::size_t r) { return synonyms->synonyms(cand[i], ref[r]); });
  }

  for (const auto& match : stages) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (cand_match[i] != kNone) continue;
      std::vector<std::size_t> options;
      for (std::size_t r = 0; r < ref.size(); ++r) {
        if (!ref_used[r] && match(i, r)) options.push_back(r);
      }
      if (options.empty()) continue;

      std::size_t choice = kNone;
      if (i > 0 && cand_match[i - 1] != kNone) {
        std::size_t next = cand_match[i - 1] + 1;
        if (std::find(options.begin(), options.end(), next) != options.end()) choice = next;
      }
      if (choice == kNone && i + 1 < cand.size() && cand_match[i + 1] == kNone) {
        for (std::size_t r : options) {
          if (r + 1 < ref.size() && !ref_used[r + 1] && match(i + 1, r + 1)) {
            choice = r;
            break;
          }
        }
      }
      if (choice == kNone) choice = options.front();
      cand_match[i] = choice;
      ref_used[choice] = true;
    }
  }

  MeteorAlignment out;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (cand_match[i] != kNone) out.matches.emplace_back(i, cand_match[i]);
  }
  const std::size_t m = out.matches.size();
  if (m == 0) return out;

  out.chunks = 1;
  for (std::size_t k = 1; k < m; ++k) {
    const auto& prev = out.matches[k - 1];
    const auto& cur = out.matches[k];
    if (!(cur.first == prev.first + 1 && cur.second == prev.second + 1)) ++out.chunks;
  }
  const double md = static_cast<double>(m);
  const double p = md / static_cast<double>(cand.size());
  const double r = md / static_cast<double>(ref.size());
  const double fmean = 10.0 * p * r / (r + 9.0 * p);
  const double frag = static_cast<double>(out.chunks) / md;
  out.score = fmean * (1.0 - 0.5 * frag * frag * frag);
  return out;
}

double meteor(const TokenSequence& cand, const TokenSequence& ref, const SynonymLexicon* synonyms) {
  return meteor_align(cand, ref, synonyms).score;
}

// --- BERTScore ------------------------------------------------------------

void validate(const EmbeddingRecord& rec) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::Parse, "embedding record \"" + rec.id + "\": " + what);
  };
  if (static_cast<std::size_t>(rec.ref_vectors.rows()) != rec.ref_tokens.size()) {
    fail("ref_vectors row count differs from ref_tokens");
  }
  if (static_cast<std::size_t>(rec.cand_vectors.rows()) != rec.cand_tokens.size()) {
    fail("cand_vectors row count differs from cand_tokens");
  }
  if (rec.ref_vectors.rows() > 0 && rec.cand_vectors.rows() > 0 &&
      rec.ref_vectors.cols() != rec.cand_vectors.cols()) {
    fail("ref and cand vectors have different widths");
  }
  if (!rec.ref_vectors.allFinite() || !rec.cand_vectors.allFinite()) fail("non-finite entry");
}

double bertscore_recall(const EmbeddingRecord& rec) {
  validate(rec);
  if (rec.ref_vectors.rows() == 0 || rec.cand_vectors.rows() == 0) {
    throw Error(ErrorKind::EmptyInput, "bertscore_recall: record \"" + rec.id + "\" has an empty side");
  }
  // Row by row throughout: Eigen's rowwise reductions and GEMM round
  // differently depending on a row's position, which would break exact
  // candidate-order invariance.
  auto unit_rows = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double norm = m.row(i).norm();
      if (norm == 0.0) {
        throw Error(ErrorKind::Degenerate, "bertscore_recall: record \"" + rec.id + "\" has a zero-norm row");
      }
      out.row(i) = m.row(i) / norm;
    }
    return out;
  };
  const Eigen::MatrixXd ref_unit = unit_rows(rec.ref_vectors);
  const Eigen::MatrixXd cand_unit = unit_rows(rec.cand_vectors);
  Eigen::VectorXd best(ref_unit.rows());
  for (Eigen::Index i = 0; i < ref_unit.rows(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cand_unit.rows(); ++j) m = std::max(m, ref_unit.row(i).dot(cand_unit.row(j)));
    best(i) = m;
  }
  return best.mean();
}

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const std::string& id, const char* field) {
  if (!rows.is_array()) throw Error(ErrorKind::Parse, "embedding record \"" + id + "\": " + field + " must be an array");
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw Error(ErrorKind::Parse, "embedding record \"" + id + "\": ragged rows in " + field);
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw Error(ErrorKind::Parse, "embedding record \"" + id + "\": non-numeric entry");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

}  // namespace

std::vector<EmbeddingRecord> parse_embeddings(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("embeddings: invalid JSON (") + e.what() + ")");
  }
  const nlohmann::json& items = doc.is_object() && doc.contains("records") ? doc["records"] : doc;
  if (!items.is_array()) throw Error(ErrorKind::Parse, "embeddings: expected an array of records");

  std::vector<EmbeddingRecord> out;
  for (const auto& item : items) {
    EmbeddingRecord rec;
    try {
      rec.id = item.at("id").get<std::string>();
      rec.ref_tokens = item.at("ref_tokens").get<std::vector<std::string>>();
      rec.cand_tokens = item.at("cand_tokens").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, std::string("embeddings: ") + e.what());
    }
    if (!item.contains("ref_vectors") || !item.contains("cand_vectors")) {
      throw Error(ErrorKind::MissingField, "embedding record \"" + rec.id + "\": missing vectors");
    }
    rec.ref_vectors = matrix_from_json(item["ref_vectors"], rec.id, "ref_vectors");
    rec.cand_vectors = matrix_from_json(item["cand_vectors"], rec.id, "cand_vectors");
    validate(rec);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EmbeddingRecord> load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open embeddings file: " + path.string());
  return parse_embeddings(in);
}

// --- Corpus scoring -------------------------------------------------------

ScoreBundle score_pair(std::string_view prediction, std::string_view reference, const ScoreConfig& config) {
  const TokenSequence cand = word_tokenize(prediction);
  const TokenSequence ref = word_tokenize(reference);
  ScoreBundle b;
  b.rouge1 = rouge_n(cand, ref, 1, config.stem);
  b.rouge2 = rouge_n(cand, ref, 2, config.stem);
  b.rougeL = rouge_l(cand, ref, config.stem);
  b.rougeLsum = rouge_lsum(prediction, reference, config.stem);
  b.bleu = bleu_from_stats(bleu_stats(cand, ref), config.smoothing);
  b.meteor = meteor(cand, ref, config.synonyms);
  return b;
}

PredictionMap parse_predictions(std::istream& in) {
  PredictionMap preds;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "predictions line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Parse, where + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error(ErrorKind::Parse, where + ": expected a JSON object");
    for (const char* key : {"id", "prediction"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        throw Error(ErrorKind::MissingField, where + ": missing string field \"" + key + "\"");
      }
    }
    auto id = obj["id"].get<std::string>();
    if (!preds.emplace(id, obj["prediction"].get<std::string>()).second) {
      throw Error(ErrorKind::DuplicateId, "duplicate prediction id \"" + id + "\"");
    }
  }
  return preds;
}

PredictionMap load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open predictions file: " + path.string());
  return parse_predictions(in);
}

namespace {

RougeTriple mean_triple(const std::vector<RecordScore>& rows, RougeTriple ScoreBundle::*field) {
  RougeTriple m;
  for (const auto& r : rows) {
    m.precision += (r.scores.*field).precision;
    m.recall += (r.scores.*field).recall;
    m.f1 += (r.scores.*field).f1;
  }
  const auto n = static_cast<double>(rows.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

}  // namespace

CorpusScores score_corpus(const PredictionMap& predictions, const Corpus& references, Split split,
                          const std::vector<EmbeddingRecord>* embeddings, const ScoreConfig& config) {
  std::map<std::string, const ReportRecord*> refs;
  for (const auto& r : references) {
    if (r.split == split) refs.emplace(r.id, &r);
  }
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto& [id, _] : refs) {
    if (!predictions.count(id)) missing.push_back(id);
  }
  for (const auto& [id, _] : predictions) {
    if (!refs.count(id)) extra.push_back(id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "id mismatch";
    if (!missing.empty()) msg += "; missing predictions: " + join(missing, ", ");
    if (!extra.empty()) msg += "; unknown ids: " + join(extra, ", ");
    throw Error(ErrorKind::IdMismatch, msg);
  }
  if (refs.empty()) {
    throw Error(ErrorKind::EmptyInput, std::string("no references in split \"") + to_string(split) + "\"");
  }

  std::map<std::string, const EmbeddingRecord*> emb;
  if (embeddings) {
    for (const auto& e : *embeddings) emb.emplace(e.id, &e);
    std::vector<std::string> no_emb;
    for (const auto& [id, _] : refs) {
      if (!emb.count(id)) no_emb.push_back(id);
    }
    if (!no_emb.empty()) {
      throw Error(ErrorKind::IdMismatch, "missing embedding records: " + join(no_emb, ", "));
    }
  }

  CorpusScores out;
  BleuStats corpus_stats;
  for (const auto& [id, ref] : refs) {
    const std::string& pred = predictions.at(id);
    RecordScore row{id, score_pair(pred, ref->impression, config)};
    if (embeddings) row.scores.bertscore_recall = bertscore_recall(*emb.at(id));
    corpus_stats += bleu_stats(word_tokenize(pred), word_tokenize(ref->impression));
    out.per_record.push_back(std::move(row));
  }

  auto& agg = out.aggregate;
  agg.rouge1 = mean_triple(out.per_record, &ScoreBundle::rouge1);
  agg.rouge2 = mean_triple(out.per_record, &ScoreBundle::rouge2);
  agg.rougeL = mean_triple(out.per_record, &ScoreBundle::rougeL);
  agg.rougeLsum = mean_triple(out.per_record, &ScoreBundle::rougeLsum);
  const auto n = static_cast<double>(out.per_record.size());
  for (const auto& r : out.per_record) agg.meteor += r.scores.meteor;
  agg.meteor /= n;
  agg.bleu = bleu_from_stats(corpus_stats, config.smoothing);
  if (embeddings) {
    double sum = 0.0;
    for (const auto& r : out.per_record) sum += *r.scores.bertscore_recall;
    agg.bertscore_recall = sum / n;
  }
  return out;
}

}  // namespace radsum
