#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace radsum {

enum class Metric { rouge1, rouge2, rougeL, bleu, meteor, bertscore_recall };

const char* to_string(Metric m);
Metric parse_metric(std::string_view name);

struct EpochValue {
  long epoch = 0;
  double value = 0.0;

  bool operator==(const EpochValue&) const = default;
};

/// One metric's trajectory for one run. Epochs strictly increase.
struct MetricSeries {
  std::string run_id;
  Metric metric = Metric::rouge1;
  std::vector<EpochValue> points;
};

/// Long-form CSV with header run_id,metric,epoch,value (any column order).
/// Series come back ordered by (run_id, metric), points by epoch.
std::vector<MetricSeries> parse_history(std::istream& in);
std::vector<MetricSeries> load_history(const std::filesystem::path& path);

/// Centered moving average. The window shrinks symmetrically near the ends,
/// so the first and last points are never averaged.
MetricSeries smooth(const MetricSeries& series, int window);

/// First point strictly greater than every other point within +-radius
/// indices (at least one neighbour on each side) that also rises at least
/// min_prominence above the lowest earlier value.
std::optional<EpochValue> detect_early_peak(const MetricSeries& series, std::size_t radius = 3,
                                            double min_prominence = 0.02);

/// Global minimum strictly after after_epoch, earliest on ties.
std::optional<EpochValue> detect_trough(const MetricSeries& series, long after_epoch);

/// First epoch after the trough that follows the peak where the value stays
/// above peak.value for `sustain` consecutive recorded epochs.
std::optional<long> detect_recovery(const MetricSeries& series, EpochValue peak, std::size_t sustain = 3);

/// First epoch whose value reaches fraction * final value. None when the
/// final value is not positive.
std::optional<long> detect_plateau(const MetricSeries& series, double fraction = 0.95);

/// Mean absolute step divided by the value range; 0 for a flat or too short series.
double jaggedness(const MetricSeries& series);

enum class PhaseLabel { monotonic, peak_drop_recovery, peak_drop_no_recovery, flat, jagged };

const char* to_string(PhaseLabel label);

struct DetectorConfig {
  int window = 1;
  std::size_t radius = 3;
  double min_prominence = 0.02;
  std::size_t sustain = 3;
  double plateau_fraction = 0.95;
  double jagged_threshold = 0.05;

  /// Throws InvalidArgument on an even or non-positive window, zero sustain,
  /// or a plateau fraction outside (0, 1].
  void validate() const;
};

struct PhaseReport {
  std::optional<EpochValue> early_peak;
  std::optional<EpochValue> trough;
  std::optional<long> recovery_onset;
  std::optional<long> plateau_onset;
  double jaggedness = 0.0;
  bool jagged = false;
  PhaseLabel label = PhaseLabel::flat;
};

/// Smooths with config.window, runs every detector and applies the label
/// table. Total over series: empty and single-point series are flat.
PhaseReport classify_run(const MetricSeries& series, const DetectorConfig& config = {});

/// Per-epoch phase name for plot data: rise, drop, recovery or plateau.
std::vector<std::string> phase_labels(const MetricSeries& series, const PhaseReport& report);

/// Maximum value, earliest epoch on ties.
EpochValue best_score(const MetricSeries& series);

/// Onset epochs are assumed to scale like c / fraction. c is the largest
/// observed onset * fraction, so the estimate is a lower bound.
long predict_onset(const std::vector<std::pair<double, long>>& onsets, double target_fraction);

struct RunMeta {
  std::string run_id;
  std::string checkpoint;
  double train_fraction = 1.0;
};

/// CSV with header run_id,checkpoint,train_fraction.
std::vector<RunMeta> parse_run_meta(std::istream& in);
std::vector<RunMeta> load_run_meta(const std::filesystem::path& path);

struct PeakRow {
  std::string checkpoint;
  double train_fraction = 1.0;
  std::string run_id;
  std::optional<long> peak_epoch;
  std::map<Metric, double> at_peak;  // metrics recorded at the peak epoch
};

struct PeakInput {
  RunMeta meta;
  PhaseReport report;
  std::map<Metric, double> at_peak;
};

/// One row per run, ordered by checkpoint, then train fraction, then run id.
std::vector<PeakRow> peak_table(const std::vector<PeakInput>& runs);

/// Values of every series of the run at `epoch`, for metrics that recorded it.
std::map<Metric, double> values_at(const std::vector<MetricSeries>& history, const std::string& run_id,
                                   long epoch);

}  // namespace radsum
