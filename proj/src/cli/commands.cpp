#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "cli/config.hpp"
#include "cli/manifest.hpp"
#include "cli/output.hpp"
#include "radsum/corpus.hpp"
#include "radsum/csv.hpp"
#include "radsum/diagnosis.hpp"
#include "radsum/error.hpp"
#include "radsum/history.hpp"
#include "radsum/metrics.hpp"
#include "radsum/outlier.hpp"
#include "radsum/stats.hpp"

namespace radsum::cli {
namespace fs = std::filesystem;

namespace {

struct Context {
  fs::path out_dir;
  bool quiet = false;
  std::ostream* log = nullptr;
  std::string command_line;

  void write(const std::string& name, const std::string& content) const {
    write_atomic(out_dir / name, content);
    if (!quiet) *log << "wrote " << (out_dir / name).string() << "\n";
  }

  void finish(const Json& config, const std::vector<fs::path>& inputs) const {
    Json manifest = to_json(make_manifest(command_line, config, inputs));
    manifest["config"] = config;
    write("manifest.json", render_json(manifest));
  }
};

struct Command {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::function<void(const Params&, const Context&)> action;
};

// Converts library argument errors raised while interpreting flags into usage errors.
template <typename F>
auto as_usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Split split_param(const Params& p) {
  return as_usage([&] { return parse_split(p.text("split")); });
}

NegationLexicon lexicon_param(const Params& p, std::vector<fs::path>& inputs) {
  if (auto path = p.optional_text("lexicon")) {
    inputs.emplace_back(*path);
    return NegationLexicon::load(*path);
  }
  return NegationLexicon{};
}

Json optional_path(const Params& p, const std::string& name) {
  auto v = p.optional_text(name);
  return v ? Json(*v) : Json(nullptr);
}

Json triple_json(const RougeTriple& t) {
  return Json{{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}};
}

Json bundle_json(const ScoreBundle& b) {
  Json j{{"rouge1", triple_json(b.rouge1)},
         {"rouge2", triple_json(b.rouge2)},
         {"rougeL", triple_json(b.rougeL)},
         {"rougeLsum", triple_json(b.rougeLsum)},
         {"bleu", b.bleu},
         {"meteor", b.meteor}};
  if (b.bertscore_recall) j["bertscore_recall"] = *b.bertscore_recall;
  return j;
}

Json stats_json(const LengthStats& s) {
  return Json{{"n", s.n},
              {"mean", s.mean},
              {"median", s.median},
              {"q1", s.q1},
              {"q3", s.q3},
              {"iqr", s.iqr},
              {"whisker_lo", s.whisker_lo},
              {"whisker_hi", s.whisker_hi},
              {"outlier_ids", s.outlier_ids}};
}

Json point_json(const std::optional<EpochValue>& p) {
  if (!p) return nullptr;
  return Json{{"epoch", p->epoch}, {"value", p->value}};
}

Json epoch_json(const std::optional<long>& e) { return e ? Json(*e) : Json(nullptr); }

std::string csv_line(const std::vector<std::string>& fields) {
  std::ostringstream os;
  csv::write_row(os, fields);
  return os.str();
}

// --- corpus-stats ---------------------------------------------------------

struct FieldLengths {
  std::vector<std::size_t> lengths;
  std::vector<std::string> ids;
};

FieldLengths field_lengths(const Corpus& records, bool findings) {
  FieldLengths f;
  for (const auto& r : records) {
    f.lengths.push_back(word_token_count(findings ? r.findings : r.impression));
    f.ids.push_back(r.id);
  }
  return f;
}

void cmd_corpus_stats(const Params& p, const Context& ctx) {
  std::vector<fs::path> inputs{p.text("corpus")};
  const Split split = split_param(p);
  const long grid = p.integer("grid-size");
  if (grid < 2) throw UsageError("--grid-size must be at least 2");
  const NegationLexicon lexicon = lexicon_param(p, inputs);
  const Corpus corpus = load_corpus(p.text("corpus"));

  const Corpus selected = records_in_split(corpus, split);
  if (selected.empty()) throw Error(ErrorKind::EmptyInput, std::string("split \"") + to_string(split) + "\" is empty");

  const Json config{{"corpus", p.text("corpus")},
                    {"split", to_string(split)},
                    {"grid_size", grid},
                    {"lexicon", optional_path(p, "lexicon")},
                    {"tokenizer", "whitespace+punctuation"}};

  std::string box = csv_line({"split", "field", "n", "mean", "median", "q1", "q3", "iqr", "whisker_lo", "whisker_hi",
                              "n_outliers"});
  Json prevalence_by_split = Json::object();
  for (Split s : {Split::train, Split::validation, Split::test}) {
    const Corpus part = records_in_split(corpus, s);
    if (part.empty()) continue;
    for (bool findings : {true, false}) {
      auto f = field_lengths(part, findings);
      auto st = length_stats(f.lengths, f.ids);
      box += csv_line({to_string(s), findings ? "findings" : "impression", std::to_string(st.n), csv::fixed6(st.mean),
                       csv::fixed6(st.median), csv::fixed6(st.q1), csv::fixed6(st.q3), csv::fixed6(st.iqr),
                       csv::fixed6(st.whisker_lo), csv::fixed6(st.whisker_hi), std::to_string(st.outlier_ids.size())});
    }
    prevalence_by_split[to_string(s)] = negation_prevalence(corpus, s, lexicon);
  }
  ctx.write("box_stats.csv", box);

  Json stats{{"split", to_string(split)}, {"n", selected.size()}};
  for (bool findings : {true, false}) {
    const char* field = findings ? "findings" : "impression";
    auto f = field_lengths(selected, findings);
    Json entry = stats_json(length_stats(f.lengths, f.ids));
    std::vector<double> values(f.lengths.begin(), f.lengths.end());
    std::string kde_csv = csv_line({"x", "density"});
    try {
      const double h = silverman_bandwidth(values);
      entry["bandwidth"] = h;
      auto curve = kde(values, h, static_cast<std::size_t>(grid));
      for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        kde_csv += csv_line({csv::fixed6(curve.grid[i]), csv::fixed6(curve.density[i])});
      }
      entry["kde_integral"] = trapezoid(curve.grid, curve.density);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      entry["bandwidth"] = nullptr;
      entry["bandwidth_note"] = e.what();
    }
    stats[field] = entry;
    ctx.write(std::string("kde_") + field + ".csv", kde_csv);
  }
  stats["config"] = config;
  ctx.write("stats.json", render_json(stats));

  Json prevalence{{"split", to_string(split)},
                  {"prevalence", negation_prevalence(corpus, split, lexicon)},
                  {"by_split", prevalence_by_split},
                  {"lexicon_patterns", lexicon.patterns().size()},
                  {"config", config}};
  ctx.write("prevalence.json", render_json(prevalence));
  ctx.finish(config, inputs);
}

// --- clean ----------------------------------------------------------------

void cmd_clean(const Params& p, const Context& ctx) {
  const Corpus corpus = load_corpus(p.text("corpus"));
  const Json config{{"corpus", p.text("corpus")}, {"rule", "impression_tokens <= findings_tokens"}};
  auto result = clean_corpus(corpus);

  std::string jsonl;
  for (const auto& r : result.retained) {
    jsonl += Json{{"id", r.id}, {"findings", r.findings}, {"impression", r.impression}, {"split", to_string(r.split)}}
                 .dump() +
             "\n";
  }
  ctx.write("cleaned.jsonl", jsonl);

  Json log = Json::array();
  for (const auto& e : result.excluded) {
    log.push_back({{"id", e.id}, {"findings_tokens", e.findings_tokens}, {"impression_tokens", e.impression_tokens}});
  }
  ctx.write("exclusion_log.json", render_json(log));
  if (!ctx.quiet) {
    *ctx.log << "retained " << result.retained.size() << ", excluded " << result.excluded.size() << "\n";
  }
  ctx.finish(config, {p.text("corpus")});
}

// --- filter ---------------------------------------------------------------

void cmd_filter(const Params& p, const Context& ctx) {
  std::vector<fs::path> inputs{p.text("corpus")};
  const double percentile = p.real("percentile");
  if (!(percentile > 0.0 && percentile <= 1.0)) throw UsageError("--percentile must lie in (0, 1]");
  const Split split = split_param(p);
  const NegationLexicon lexicon = lexicon_param(p, inputs);
  const Corpus corpus = load_corpus(p.text("corpus"));

  Corpus part = records_in_split(corpus, split);
  if (part.empty()) throw Error(ErrorKind::EmptyInput, std::string("split \"") + to_string(split) + "\" is empty");
  std::sort(part.begin(), part.end(), [](const ReportRecord& a, const ReportRecord& b) { return a.id < b.id; });

  std::vector<LabeledPoint> points;
  std::vector<Vec2> raw;
  std::map<std::string, const ReportRecord*> by_id;
  for (const auto& r : part) {
    Vec2 v{static_cast<double>(word_token_count(r.findings)), static_cast<double>(word_token_count(r.impression))};
    points.push_back({r.id, v});
    raw.push_back(v);
    by_id[r.id] = &r;
  }
  const GaussianModel2D model = fit_gaussian(raw);
  const FilterResult result = filter_percentile(points, percentile, model);

  std::size_t max_findings = 0;
  std::size_t max_impression = 0;
  std::set<std::string> retained(result.retained_ids.begin(), result.retained_ids.end());
  for (const auto& pt : points) {
    if (!retained.count(pt.id)) continue;
    max_findings = std::max(max_findings, static_cast<std::size_t>(pt.point.x));
    max_impression = std::max(max_impression, static_cast<std::size_t>(pt.point.y));
  }

  const Json config{{"corpus", p.text("corpus")},
                    {"split", to_string(split)},
                    {"percentile", percentile},
                    {"lexicon", optional_path(p, "lexicon")},
                    {"truncation_multiplier", 1.33}};
  Json out{{"percentile", percentile},
           {"threshold_d2", result.threshold_d2},
           {"n", points.size()},
           {"retained_ids", result.retained_ids},
           {"excluded_ids", result.excluded_ids},
           {"model",
            {{"mean", {model.mean.x, model.mean.y}},
             {"covariance", {{model.covariance[0][0], model.covariance[0][1]}, {model.covariance[1][0], model.covariance[1][1]}}},
             {"ridge", model.ridge}}},
           {"truncation",
            {{"findings_max_tokens", max_findings},
             {"findings_length", truncation_length(max_findings)},
             {"impression_max_tokens", max_impression},
             {"impression_length", truncation_length(max_impression)}}},
           {"config", config}};
  ctx.write("filter.json", render_json(out));

  std::map<std::string, double> d2;
  for (std::size_t i = 0; i < result.retained_ids.size(); ++i) d2[result.retained_ids[i]] = result.retained_d2[i];
  for (std::size_t i = 0; i < result.excluded_ids.size(); ++i) d2[result.excluded_ids[i]] = result.excluded_d2[i];
  std::string scatter = csv_line({"id", "findings_len", "impression_len", "d2", "retained_flag", "negated_flag"});
  for (const auto& pt : points) {
    const bool negated = classify(by_id.at(pt.id)->impression, lexicon) == DiagnosisClass::negated;
    scatter += csv_line({pt.id, std::to_string(static_cast<std::size_t>(pt.point.x)),
                         std::to_string(static_cast<std::size_t>(pt.point.y)), csv::fixed6(d2.at(pt.id)),
                         retained.count(pt.id) ? "1" : "0", negated ? "1" : "0"});
  }
  ctx.write("scatter.csv", scatter);
  ctx.finish(config, inputs);
}

// --- score ----------------------------------------------------------------

void cmd_score(const Params& p, const Context& ctx) {
  std::vector<fs::path> inputs{p.text("corpus"), p.text("predictions")};
  const Split split = split_param(p);
  ScoreConfig sc;
  sc.stem = p.flag("stem");
  sc.smoothing = as_usage([&] { return parse_smoothing(p.text("smoothing")); });

  std::optional<SynonymLexicon> synonyms;
  if (auto path = p.optional_text("synonyms")) {
    inputs.emplace_back(*path);
    synonyms = SynonymLexicon::load(*path);
    sc.synonyms = &*synonyms;
  }
  std::optional<std::vector<EmbeddingRecord>> embeddings;
  if (auto path = p.optional_text("embeddings")) {
    inputs.emplace_back(*path);
    embeddings = load_embeddings(*path);
  }

  const Corpus corpus = load_corpus(p.text("corpus"));
  const PredictionMap predictions = load_predictions(p.text("predictions"));
  const CorpusScores scores = score_corpus(predictions, corpus, split, embeddings ? &*embeddings : nullptr, sc);

  const Json config{{"corpus", p.text("corpus")},
                    {"predictions", p.text("predictions")},
                    {"embeddings", optional_path(p, "embeddings")},
                    {"synonyms", optional_path(p, "synonyms")},
                    {"split", to_string(split)},
                    {"stemming", sc.stem},
                    {"smoothing", to_string(sc.smoothing)},
                    {"lowercase", true},
                    {"bleu_max_order", 4}};
  Json rows = Json::array();
  for (const auto& r : scores.per_record) {
    Json row{{"id", r.id}};
    row.update(bundle_json(r.scores));
    rows.push_back(row);
  }
  Json report{{"per_record", rows}, {"aggregate", bundle_json(scores.aggregate)}, {"config", config}};
  ctx.write("score_report.json", render_json(report));
  if (!ctx.quiet) {
    *ctx.log << "scored " << rows.size() << " records; rouge1 f1 " << csv::fixed6(scores.aggregate.rouge1.f1)
             << ", bleu " << csv::fixed6(scores.aggregate.bleu) << "\n";
  }
  ctx.finish(config, inputs);
}

// --- classify -------------------------------------------------------------

void cmd_classify(const Params& p, const Context& ctx) {
  std::vector<fs::path> inputs{p.text("corpus"), p.text("predictions")};
  const Split split = split_param(p);
  const NegationLexicon lexicon = lexicon_param(p, inputs);
  const Corpus corpus = load_corpus(p.text("corpus"));
  const PredictionMap predictions = load_predictions(p.text("predictions"));

  TextById references;
  for (const auto& r : records_in_split(corpus, split)) references[r.id] = r.impression;
  if (references.empty()) throw Error(ErrorKind::EmptyInput, std::string("split \"") + to_string(split) + "\" is empty");

  const ConfusionReport report = confusion(predictions, references, lexicon);
  const BaselineScores baseline = dummy_baseline(references, lexicon);
  const Json config{{"corpus", p.text("corpus")},
                    {"predictions", p.text("predictions")},
                    {"lexicon", optional_path(p, "lexicon")},
                    {"split", to_string(split)}};
  Json out{{"tp", report.counts.tp},
           {"fp", report.counts.fp},
           {"fn", report.counts.fn},
           {"tn", report.counts.tn},
           {"precision", report.precision},
           {"recall", report.recall},
           {"positive_class", to_string(DiagnosisClass::negated)},
           {"dummy_baseline", {{"precision", baseline.precision}, {"recall", baseline.recall}}},
           {"config", config}};
  ctx.write("confusion.json", render_json(out));
  ctx.finish(config, inputs);
}

// --- history --------------------------------------------------------------

void cmd_history(const Params& p, const Context& ctx) {
  std::vector<fs::path> inputs{p.text("history")};
  DetectorConfig dc;
  dc.window = static_cast<int>(p.integer("window"));
  const long radius = p.integer("radius");
  const long sustain = p.integer("sustain");
  if (radius < 1) throw UsageError("--radius must be at least 1");
  if (sustain < 1) throw UsageError("--sustain must be at least 1");
  dc.radius = static_cast<std::size_t>(radius);
  dc.sustain = static_cast<std::size_t>(sustain);
  dc.min_prominence = p.real("prominence");
  dc.plateau_fraction = p.real("plateau-fraction");
  dc.jagged_threshold = p.real("jagged-threshold");
  as_usage([&] { dc.validate(); return 0; });
  const Metric metric = as_usage([&] { return parse_metric(p.text("metric")); });
  const std::vector<double> targets = p.reals("targets");
  for (double t : targets) {
    if (!(t > 0.0 && t <= 1.0)) throw UsageError("--targets entries must lie in (0, 1]");
  }

  const auto history = load_history(p.text("history"));
  std::vector<std::string> run_ids;
  for (const auto& s : history) {
    if (run_ids.empty() || run_ids.back() != s.run_id) run_ids.push_back(s.run_id);
  }
  if (run_ids.empty()) throw Error(ErrorKind::EmptyInput, "history file has no rows");

  std::map<std::string, RunMeta> meta;
  if (auto path = p.optional_text("meta")) {
    inputs.emplace_back(*path);
    for (auto& m : load_run_meta(*path)) meta[m.run_id] = m;
    std::vector<std::string> missing;
    std::vector<std::string> unknown;
    for (const auto& id : run_ids) {
      if (!meta.count(id)) missing.push_back(id);
    }
    for (const auto& [id, _] : meta) {
      if (!std::binary_search(run_ids.begin(), run_ids.end(), id)) unknown.push_back(id);
    }
    if (!missing.empty() || !unknown.empty()) {
      std::string msg = "run metadata mismatch";
      if (!missing.empty()) msg += "; runs without metadata: " + join(missing, ", ");
      if (!unknown.empty()) msg += "; metadata for unknown runs: " + join(unknown, ", ");
      throw Error(ErrorKind::IdMismatch, msg);
    }
  } else {
    for (const auto& id : run_ids) meta[id] = RunMeta{id, id, 1.0};
  }

  const Json config{{"history", p.text("history")},
                    {"meta", optional_path(p, "meta")},
                    {"metric", to_string(metric)},
                    {"window", dc.window},
                    {"radius", dc.radius},
                    {"prominence", dc.min_prominence},
                    {"sustain", dc.sustain},
                    {"plateau_fraction", dc.plateau_fraction},
                    {"jagged_threshold", dc.jagged_threshold},
                    {"monotonic_fraction", 0.95},
                    {"targets", targets}};

  Json runs = Json::array();
  std::vector<PeakInput> peaks;
  std::set<std::string> stems;
  for (const auto& id : run_ids) {
    auto it = std::find_if(history.begin(), history.end(),
                           [&](const MetricSeries& s) { return s.run_id == id && s.metric == metric; });
    if (it == history.end()) {
      throw Error(ErrorKind::MissingField, "run \"" + id + "\" has no " + to_string(metric) + " series");
    }
    const MetricSeries& series = *it;
    const PhaseReport report = classify_run(series, dc);
    const RunMeta& m = meta.at(id);

    PeakInput pi{m, report, {}};
    if (report.early_peak) pi.at_peak = values_at(history, id, report.early_peak->epoch);
    peaks.push_back(pi);

    std::string stem = file_stem(id);
    for (int k = 2; stems.count(stem); ++k) stem = file_stem(id) + "-" + std::to_string(k);
    stems.insert(stem);
    const std::string plot_name = "plots/" + stem + ".csv";

    Json best = nullptr;
    if (!series.points.empty()) {
      auto b = best_score(series);
      best = Json{{"epoch", b.epoch}, {"value", b.value}};
    }
    runs.push_back({{"run_id", id},
                    {"checkpoint", m.checkpoint},
                    {"train_fraction", m.train_fraction},
                    {"metric", to_string(metric)},
                    {"n_points", series.points.size()},
                    {"early_peak", point_json(report.early_peak)},
                    {"trough", point_json(report.trough)},
                    {"recovery_onset", epoch_json(report.recovery_onset)},
                    {"plateau_onset", epoch_json(report.plateau_onset)},
                    {"jaggedness", report.jaggedness},
                    {"jagged", report.jagged},
                    {"label", to_string(report.label)},
                    {"best", best},
                    {"plot", plot_name}});

    const MetricSeries smoothed = smooth(series, dc.window);
    const auto phases = phase_labels(series, report);
    std::string plot = csv_line({"epoch", "raw", "smoothed", "phase"});
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      plot += csv_line({std::to_string(series.points[i].epoch), csv::fixed6(series.points[i].value),
                        csv::fixed6(smoothed.points[i].value), phases[i]});
    }
    ctx.write(plot_name, plot);
  }
  ctx.write("phase_reports.json", render_json(Json{{"metric", to_string(metric)}, {"runs", runs}, {"config", config}}));

  const Metric columns[] = {Metric::rouge1, Metric::bertscore_recall, Metric::meteor, Metric::bleu};
  std::string table = csv_line({"checkpoint", "train_fraction", "run_id", "peak_epoch", "rouge1", "bertscore_recall",
                                "meteor", "bleu"});
  for (const auto& row : peak_table(peaks)) {
    std::vector<std::string> f{row.checkpoint, csv::fixed6(row.train_fraction), row.run_id,
                               row.peak_epoch ? std::to_string(*row.peak_epoch) : ""};
    for (Metric c : columns) {
      auto v = row.at_peak.find(c);
      f.push_back(v == row.at_peak.end() ? "" : csv::fixed6(v->second));
    }
    table += csv_line(f);
  }
  ctx.write("peak_table.csv", table);

  // Onset extrapolation per checkpoint, for target fractions without an observed onset.
  std::map<std::string, std::vector<const PeakInput*>> by_checkpoint;
  for (const auto& pi : peaks) by_checkpoint[pi.meta.checkpoint].push_back(&pi);
  Json checkpoints = Json::array();
  for (auto& [checkpoint, list] : by_checkpoint) {
    std::sort(list.begin(), list.end(), [](const PeakInput* a, const PeakInput* b) {
      return std::tie(a->meta.train_fraction, a->meta.run_id) < std::tie(b->meta.train_fraction, b->meta.run_id);
    });
    std::vector<std::pair<double, long>> observed;
    Json observed_json = Json::array();
    for (const PeakInput* pi : list) {
      if (!pi->report.recovery_onset) continue;
      observed.emplace_back(pi->meta.train_fraction, *pi->report.recovery_onset);
      observed_json.push_back({{"run_id", pi->meta.run_id},
                               {"train_fraction", pi->meta.train_fraction},
                               {"onset", *pi->report.recovery_onset}});
    }
    Json predictions = Json::array();
    if (!observed.empty()) {
      for (double t : targets) {
        const bool seen = std::any_of(observed.begin(), observed.end(),
                                      [&](const auto& o) { return std::abs(o.first - t) < 1e-9; });
        if (!seen) predictions.push_back({{"target_fraction", t}, {"estimate", predict_onset(observed, t)}});
      }
    }
    checkpoints.push_back({{"checkpoint", checkpoint}, {"observed", observed_json}, {"predictions", predictions}});
  }
  ctx.write("onsets.json", render_json(Json{{"checkpoints", checkpoints}, {"config", config}}));
  ctx.finish(config, inputs);
}

std::vector<Command> commands() {
  return {
      {"corpus-stats",
       "Length distributions, KDE curves and negation prevalence",
       {{"corpus", "", "corpus file (.jsonl or .csv)", true},
        {"split", "train", "split to characterise"},
        {"grid-size", "512", "KDE grid points"},
        {"lexicon", "", "negation lexicon file (default: seed phrases)"}},
       cmd_corpus_stats},
      {"clean",
       "Drop records whose impression is longer than its findings",
       {{"corpus", "", "corpus file (.jsonl or .csv)", true}},
       cmd_clean},
      {"filter",
       "Mahalanobis percentile filter over length pairs and truncation budget",
       {{"corpus", "", "corpus file (.jsonl or .csv)", true},
        {"percentile", "0.98", "fraction of points to retain, in (0, 1]"},
        {"split", "train", "split to filter"},
        {"lexicon", "", "negation lexicon for the scatter negated_flag"}},
       cmd_filter},
      {"score",
       "ROUGE, BLEU, METEOR and optional BERTScore-recall against references",
       {{"corpus", "", "reference corpus file", true},
        {"predictions", "", "predictions JSONL {id, prediction}", true},
        {"embeddings", "", "token embeddings JSON for BERTScore-recall"},
        {"synonyms", "", "METEOR synonym groups, one group per line"},
        {"split", "validation", "reference split"},
        {"stem", "true", "Porter-stem tokens for ROUGE"},
        {"smoothing", "none", "BLEU smoothing: none or add1"}},
       cmd_score},
      {"classify",
       "Negated-diagnosis confusion counts and the always-negated baseline",
       {{"corpus", "", "reference corpus file", true},
        {"predictions", "", "predictions JSONL {id, prediction}", true},
        {"lexicon", "", "negation lexicon file (default: seed phrases)"},
        {"split", "validation", "reference split"}},
       cmd_classify},
      {"history",
       "Early peak, forgetting trough, recovery and plateau detection per run",
       {{"history", "", "long-form CSV run_id,metric,epoch,value", true},
        {"meta", "", "CSV run_id,checkpoint,train_fraction"},
        {"metric", "rouge1", "metric the detectors run on"},
        {"window", "1", "odd moving-average window"},
        {"radius", "3", "early-peak neighbourhood radius in epochs"},
        {"prominence", "0.02", "minimum rise of the early peak"},
        {"sustain", "3", "epochs a recovery must stay above the peak"},
        {"plateau-fraction", "0.95", "plateau threshold relative to the final value"},
        {"jagged-threshold", "0.05", "jaggedness above which a run is jagged"},
        {"targets", "0.1,0.5,1.0", "train fractions to extrapolate onsets for"}},
       cmd_history},
  };
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& log) {
  const auto cmds = commands();
  CLI::App app{"radsum: report-summarisation corpus statistics, metrics and training-history analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  long seed = 0;
  bool quiet = false;
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default radsum-out)");
  app.add_option("--config", config_path, "key = value file with defaults for any flag");
  app.add_option("--seed", seed, "reserved; every operation is deterministic");
  auto* quiet_opt = app.add_flag("--quiet", quiet, "suppress progress messages");

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  std::set<std::string> known_keys{"out", "quiet", "seed"};
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.description);
    subs[c.name] = sub;
    for (const auto& spec : c.params) {
      sub->add_option("--" + spec.name, raw[c.name][spec.name], spec.help + (spec.fallback.empty() ? "" : " [" + spec.fallback + "]"));
      known_keys.insert(spec.name);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    ConfigFile cfg;
    if (!config_path.empty()) cfg = ConfigFile::load(config_path);
    for (const auto& [key, _] : cfg.entries()) {
      if (!known_keys.count(key)) throw UsageError("config: unknown key \"" + key + "\"");
    }

    const Command* chosen = nullptr;
    for (const auto& c : cmds) {
      if (subs[c.name]->parsed()) chosen = &c;
    }
    if (!chosen) throw UsageError("no subcommand given");

    Params params;
    for (const auto& spec : chosen->params) {
      std::string value = spec.fallback;
      if (subs[chosen->name]->count("--" + spec.name)) {
        value = raw[chosen->name][spec.name];
      } else if (auto v = cfg.get(spec.name)) {
        value = *v;
      }
      if (spec.required && value.empty()) throw UsageError("missing required --" + spec.name);
      params.set(spec.name, value);
    }

    Context ctx;
    ctx.out_dir = out_opt->count() ? out_dir : cfg.get("out").value_or("radsum-out");
    if (quiet_opt->count()) {
      ctx.quiet = true;
    } else if (auto q = cfg.get("quiet")) {
      Params qp;
      qp.set("quiet", *q);
      ctx.quiet = qp.flag("quiet");
    }
    ctx.log = &log;
    for (int i = 0; i < argc; ++i) ctx.command_line += (i ? " " : "") + std::string(argv[i]);

    chosen->action(params, ctx);
    return 0;
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    log << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace radsum::cli
