#include "radsum/history.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <tuple>

#include "radsum/csv.hpp"
#include "radsum/error.hpp"
#include "radsum/text.hpp"

namespace radsum {
namespace {

constexpr std::pair<Metric, const char*> kMetricNames[] = {
    {Metric::rouge1, "rouge1"}, {Metric::rouge2, "rouge2"}, {Metric::rougeL, "rougeL"},
    {Metric::bleu, "bleu"},     {Metric::meteor, "meteor"}, {Metric::bertscore_recall, "bertscore_recall"},
};

std::string row_location(std::size_t row) { return "row " + std::to_string(row); }

// Maps header names to column positions; every name in `required` must be present.
std::vector<std::size_t> header_columns(const std::vector<std::string>& header,
                                        std::initializer_list<const char*> required) {
  std::vector<std::size_t> cols;
  for (const char* name : required) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) { return trim(h) == name; });
    if (it == header.end()) {
      throw Error(ErrorKind::MissingField, std::string("header is missing column \"") + name + "\"");
    }
    cols.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  return cols;
}

long parse_epoch(std::string_view text, std::size_t row) {
  text = trim(text);
  long epoch = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), epoch);
  if (ec != std::errc() || ptr != text.data() + text.size() || epoch < 1) {
    throw Error(ErrorKind::Parse, row_location(row) + ": epoch \"" + std::string(text) + "\" is not a positive integer");
  }
  return epoch;
}

double parse_real(std::string_view text, std::size_t row, const char* what) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::Parse, row_location(row) + ": " + what + " \"" + std::string(text) + "\" is not a finite number");
  }
  return v;
}

const EpochValue* find_epoch(const MetricSeries& s, long epoch) {
  auto it = std::lower_bound(s.points.begin(), s.points.end(), epoch,
                             [](const EpochValue& p, long e) { return p.epoch < e; });
  return it != s.points.end() && it->epoch == epoch ? &*it : nullptr;
}

}  // namespace

const char* to_string(Metric m) {
  for (const auto& [metric, name] : kMetricNames) {
    if (metric == m) return name;
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (const auto& [metric, n] : kMetricNames) {
    if (name == n) return metric;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown metric \"" + std::string(name) + "\"");
}

std::vector<MetricSeries> parse_history(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "history file is empty");
  auto cols = header_columns(rows.front().fields, {"run_id", "metric", "epoch", "value"});
  const std::size_t width = rows.front().fields.size();

  std::map<std::pair<std::string, Metric>, MetricSeries> grouped;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t row_no = rows[r].line;
    if (f.size() != width) {
      throw Error(ErrorKind::Parse, row_location(row_no) + ": expected " + std::to_string(width) + " fields, found " +
                                        std::to_string(f.size()));
    }
    std::string run_id(trim(f[cols[0]]));
    if (run_id.empty()) throw Error(ErrorKind::MissingField, row_location(row_no) + ": empty run_id");
    Metric metric;
    try {
      metric = parse_metric(trim(f[cols[1]]));
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, row_location(row_no) + ": " + e.what());
    }
    EpochValue p{parse_epoch(f[cols[2]], row_no), parse_real(f[cols[3]], row_no, "value")};
    auto& s = grouped[{run_id, metric}];
    s.run_id = run_id;
    s.metric = metric;
    s.points.push_back(p);
  }

  std::vector<MetricSeries> out;
  for (auto& [key, s] : grouped) {
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const EpochValue& a, const EpochValue& b) { return a.epoch < b.epoch; });
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      if (s.points[i].epoch == s.points[i - 1].epoch) {
        throw Error(ErrorKind::DuplicateId, "duplicate epoch " + std::to_string(s.points[i].epoch) + " for run \"" +
                                                s.run_id + "\" metric " + to_string(s.metric));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MetricSeries> load_history(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open history file: " + path.string());
  return parse_history(in);
}

MetricSeries smooth(const MetricSeries& series, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "smoothing window must be odd and positive, got " + std::to_string(window));
  }
  MetricSeries out = series;
  const std::size_t n = series.points.size();
  const auto half = static_cast<std::size_t>(window / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (std::size_t j = i - k; j <= i + k; ++j) sum += series.points[j].value;
    out.points[i].value = sum / static_cast<double>(2 * k + 1);
  }
  return out;
}

std::optional<EpochValue> detect_early_peak(const MetricSeries& series, std::size_t radius, double min_prominence) {
  const auto& p = series.points;
  const std::size_t n = p.size();
  if (n < 3 || radius == 0) return std::nullopt;
  double min_before = p[0].value;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const std::size_t lo = i >= radius ? i - radius : 0;
    const std::size_t hi = std::min(n - 1, i + radius);
    bool is_max = true;
    for (std::size_t j = lo; j <= hi && is_max; ++j) {
      if (j != i && p[j].value >= p[i].value) is_max = false;
    }
    if (is_max && p[i].value - min_before >= min_prominence) return p[i];
    min_before = std::min(min_before, p[i].value);
  }
  return std::nullopt;
}

std::optional<EpochValue> detect_trough(const MetricSeries& series, long after_epoch) {
  std::optional<EpochValue> best;
  for (const auto& pt : series.points) {
    if (pt.epoch <= after_epoch) continue;
    if (!best || pt.value < best->value) best = pt;
  }
  return best;
}

std::optional<long> detect_recovery(const MetricSeries& series, EpochValue peak, std::size_t sustain) {
  if (sustain == 0) throw Error(ErrorKind::InvalidArgument, "sustain must be at least 1");
  auto trough = detect_trough(series, peak.epoch);
  if (!trough) return std::nullopt;
  const auto& p = series.points;
  std::size_t run = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].epoch <= trough->epoch) continue;
    run = p[i].value > peak.value ? run + 1 : 0;
    if (run == sustain) return p[i + 1 - sustain].epoch;
  }
  return std::nullopt;
}

std::optional<long> detect_plateau(const MetricSeries& series, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "plateau fraction must lie in (0, 1]");
  }
  if (series.points.empty()) return std::nullopt;
  const double final_value = series.points.back().value;
  if (final_value <= 0.0) return std::nullopt;
  const double threshold = fraction * final_value;
  for (const auto& pt : series.points) {
    if (pt.value >= threshold) return pt.epoch;
  }
  return std::nullopt;
}

double jaggedness(const MetricSeries& series) {
  const auto& p = series.points;
  if (p.size() < 2) return 0.0;
  auto [lo, hi] = std::minmax_element(p.begin(), p.end(),
                                      [](const EpochValue& a, const EpochValue& b) { return a.value < b.value; });
  const double range = hi->value - lo->value;
  if (range <= 0.0) return 0.0;
  double steps = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) steps += std::abs(p[i].value - p[i - 1].value);
  return steps / static_cast<double>(p.size() - 1) / range;
}

const char* to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::monotonic: return "monotonic";
    case PhaseLabel::peak_drop_recovery: return "peak_drop_recovery";
    case PhaseLabel::peak_drop_no_recovery: return "peak_drop_no_recovery";
    case PhaseLabel::flat: return "flat";
    case PhaseLabel::jagged: return "jagged";
  }
  return "?";
}

void DetectorConfig::validate() const {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "window must be odd and positive, got " + std::to_string(window));
  }
  if (radius == 0) throw Error(ErrorKind::InvalidArgument, "radius must be at least 1");
  if (sustain == 0) throw Error(ErrorKind::InvalidArgument, "sustain must be at least 1");
  if (!(plateau_fraction > 0.0 && plateau_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "plateau fraction must lie in (0, 1]");
  }
  if (!(min_prominence >= 0.0) || !(jagged_threshold >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "prominence and jagged threshold must be non-negative");
  }
}

PhaseReport classify_run(const MetricSeries& raw, const DetectorConfig& config) {
  config.validate();
  PhaseReport report;
  if (raw.points.size() < 2) return report;

  const MetricSeries series = smooth(raw, config.window);
  report.jaggedness = jaggedness(series);
  report.jagged = report.jaggedness > config.jagged_threshold;
  report.plateau_onset = detect_plateau(series, config.plateau_fraction);
  report.early_peak = detect_early_peak(series, config.radius, config.min_prominence);

  if (!report.early_peak) {
    double max_value = series.points.front().value;
    for (const auto& pt : series.points) max_value = std::max(max_value, pt.value);
    if (series.points.back().value >= 0.95 * max_value) {
      report.label = PhaseLabel::monotonic;
    } else {
      report.label = report.jagged ? PhaseLabel::jagged : PhaseLabel::flat;
    }
    return report;
  }

  report.trough = detect_trough(series, report.early_peak->epoch);
  report.recovery_onset = detect_recovery(series, *report.early_peak, config.sustain);
  report.label = report.recovery_onset ? PhaseLabel::peak_drop_recovery : PhaseLabel::peak_drop_no_recovery;
  return report;
}

std::vector<std::string> phase_labels(const MetricSeries& series, const PhaseReport& report) {
  std::vector<std::string> out;
  out.reserve(series.points.size());
  for (const auto& pt : series.points) {
    const long e = pt.epoch;
    const bool plateau = report.plateau_onset && e >= *report.plateau_onset;
    if (!report.early_peak) {
      out.emplace_back(plateau ? "plateau" : "rise");
    } else if (e <= report.early_peak->epoch) {
      out.emplace_back("rise");
    } else if (!report.recovery_onset || e < *report.recovery_onset) {
      out.emplace_back("drop");
    } else {
      out.emplace_back(plateau ? "plateau" : "recovery");
    }
  }
  return out;
}

EpochValue best_score(const MetricSeries& series) {
  if (series.points.empty()) throw Error(ErrorKind::EmptyInput, "best_score: empty series");
  EpochValue best = series.points.front();
  for (const auto& pt : series.points) {
    if (pt.value > best.value) best = pt;
  }
  return best;
}

long predict_onset(const std::vector<std::pair<double, long>>& onsets, double target_fraction) {
  if (onsets.empty()) throw Error(ErrorKind::EmptyInput, "predict_onset: no observed onsets");
  if (!(target_fraction > 0.0)) throw Error(ErrorKind::InvalidArgument, "predict_onset: target fraction must be positive");
  double c = 0.0;
  for (const auto& [fraction, onset] : onsets) {
    if (!(fraction > 0.0)) throw Error(ErrorKind::InvalidArgument, "predict_onset: fractions must be positive");
    c = std::max(c, static_cast<double>(onset) * fraction);
  }
  // 53 / 0.1 lands a hair above 530 in binary; the slack keeps exact ratios exact.
  return static_cast<long>(std::ceil(c / target_fraction - 1e-9));
}

std::vector<RunMeta> parse_run_meta(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "run metadata file is empty");
  auto cols = header_columns(rows.front().fields, {"run_id", "checkpoint", "train_fraction"});
  const std::size_t width = rows.front().fields.size();
  std::vector<RunMeta> out;
  std::map<std::string, bool> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t row_no = rows[r].line;
    if (f.size() != width) throw Error(ErrorKind::Parse, row_location(row_no) + ": wrong number of fields");
    RunMeta m{std::string(trim(f[cols[0]])), std::string(trim(f[cols[1]])),
              parse_real(f[cols[2]], row_no, "train_fraction")};
    if (m.run_id.empty()) throw Error(ErrorKind::MissingField, row_location(row_no) + ": empty run_id");
    if (!(m.train_fraction > 0.0 && m.train_fraction <= 1.0)) {
      throw Error(ErrorKind::Parse, row_location(row_no) + ": train_fraction must lie in (0, 1]");
    }
    if (seen[m.run_id]) throw Error(ErrorKind::DuplicateId, "duplicate run id \"" + m.run_id + "\" in metadata");
    seen[m.run_id] = true;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<RunMeta> load_run_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open run metadata file: " + path.string());
  return parse_run_meta(in);
}

std::vector<PeakRow> peak_table(const std::vector<PeakInput>& runs) {
  std::vector<PeakRow> rows;
  for (const auto& r : runs) {
    PeakRow row{r.meta.checkpoint, r.meta.train_fraction, r.meta.run_id, std::nullopt, {}};
    if (r.report.early_peak) {
      row.peak_epoch = r.report.early_peak->epoch;
      row.at_peak = r.at_peak;
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const PeakRow& a, const PeakRow& b) {
    return std::tie(a.checkpoint, a.train_fraction, a.run_id) < std::tie(b.checkpoint, b.train_fraction, b.run_id);
  });
  return rows;
}

std::map<Metric, double> values_at(const std::vector<MetricSeries>& history, const std::string& run_id, long epoch) {
  std::map<Metric, double> out;
  for (const auto& s : history) {
    if (s.run_id != run_id) continue;
    if (const EpochValue* p = find_epoch(s, epoch)) out[s.metric] = p->value;
  }
  return out;
}

}  // namespace radsum
