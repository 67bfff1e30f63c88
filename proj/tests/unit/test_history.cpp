#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gen.hpp"
#include "radsum/error.hpp"
#include "radsum/history.hpp"

using namespace radsum;

namespace {

MetricSeries series(std::vector<double> values, long first_epoch = 1) {
  MetricSeries s;
  s.run_id = "run";
  for (std::size_t i = 0; i < values.size(); ++i) s.points.push_back({first_epoch + static_cast<long>(i), values[i]});
  return s;
}

MetricSeries transformed(const MetricSeries& s, double scale, double shift) {
  MetricSeries out = s;
  for (auto& p : out.points) p.value = scale * p.value + shift;
  return out;
}

// Values on a 1/64 grid so scaling by powers of two and integer shifts are exact.
MetricSeries random_grid_series(testgen::Rng& rng, std::size_t max_len) {
  std::vector<double> v(testgen::uniform(rng, 0, max_len));
  for (auto& x : v) x = static_cast<double>(testgen::uniform(rng, 0, 64)) / 64.0;
  return series(v);
}

const std::vector<MetricSeries>& fixture_history() {
  static const auto h = load_history(std::string(RADSUM_FIXTURES) + "/history.csv");
  return h;
}

const MetricSeries& fixture_series(const std::string& run, Metric m = Metric::rouge1) {
  for (const auto& s : fixture_history()) {
    if (s.run_id == run && s.metric == m) return s;
  }
  throw std::runtime_error("no series " + run);
}

}  // namespace

TEST(LoadHistory, InterleavedRowsAreGrouped) {
  std::istringstream in(
      "epoch,value,metric,run_id\n"
      "2,0.2,rouge1,a\n"
      "1,0.5,bleu,a\n"
      "1,0.1,rouge1,a\n"
      "1,0.3,rouge1,b\n");
  auto h = parse_history(in);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].run_id, "a");
  EXPECT_EQ(h[0].metric, Metric::rouge1);
  EXPECT_EQ(h[0].points, (std::vector<EpochValue>{{1, 0.1}, {2, 0.2}}));
  EXPECT_EQ(h[1].metric, Metric::bleu);
  EXPECT_EQ(h[2].run_id, "b");
}

TEST(LoadHistory, Errors) {
  auto kind = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_history(in);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind("run_id,metric,epoch,value\na,rouge1,1,0.1\na,rouge1,1,0.2\n"), ErrorKind::DuplicateId);
  EXPECT_EQ(kind("run_id,metric,epoch\na,rouge1,1\n"), ErrorKind::MissingField);
  EXPECT_EQ(kind("run_id,metric,epoch,value\na,rouge9,1,0.1\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("run_id,metric,epoch,value\na,rouge1,0,0.1\n"), ErrorKind::Parse);
  EXPECT_EQ(kind("run_id,metric,epoch,value\na,rouge1,1,nan\n"), ErrorKind::Parse);
  EXPECT_EQ(kind(""), ErrorKind::EmptyInput);
  std::istringstream in("run_id,metric,epoch,value\na,rouge1,1,0.1\na,rouge1,2,x\n");
  try {
    parse_history(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(Smooth, Window) {
  auto s = smooth(series({0, 1, 0}), 3);
  EXPECT_DOUBLE_EQ(s.points[0].value, 0.0);
  EXPECT_DOUBLE_EQ(s.points[1].value, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.points[2].value, 0.0);
  auto w5 = smooth(series({1, 2, 3, 4, 5, 6}), 5);
  EXPECT_DOUBLE_EQ(w5.points[1].value, 2.0);
  EXPECT_DOUBLE_EQ(w5.points[2].value, 3.0);
  EXPECT_EQ(smooth(series({0.3, 0.1}), 1).points, series({0.3, 0.1}).points);
  EXPECT_THROW(smooth(series({1, 2}), 2), Error);
  EXPECT_THROW(smooth(series({1, 2}), 0), Error);
}

TEST(EarlyPeak, Examples) {
  auto p = detect_early_peak(series({0.1, 0.3, 0.5, 0.4, 0.2, 0.2, 0.6, 0.7}), 3, 0.02);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->epoch, 3);
  EXPECT_DOUBLE_EQ(p->value, 0.5);
  // monotone series have no interior strict maximum
  EXPECT_FALSE(detect_early_peak(series({0.1, 0.2, 0.3, 0.4}), 3, 0.0));
  // a plateau at the top is not strict
  EXPECT_FALSE(detect_early_peak(series({0.1, 0.5, 0.5, 0.1}), 3, 0.0));
  // prominence is measured from the lowest earlier value
  EXPECT_FALSE(detect_early_peak(series({0.40, 0.41, 0.40, 0.39}), 3, 0.02));
  EXPECT_TRUE(detect_early_peak(series({0.40, 0.41, 0.40, 0.39}), 3, 0.005));
  // a larger value within the radius suppresses the candidate
  auto later = detect_early_peak(series({0.1, 0.5, 0.4, 0.6, 0.1}), 2, 0.0);
  ASSERT_TRUE(later);
  EXPECT_EQ(later->epoch, 4);
  EXPECT_FALSE(detect_early_peak(series({}), 3, 0.0));
}

TEST(Trough, Examples) {
  auto s = series({0.5, 0.2, 0.3, 0.1, 0.1, 0.4});
  EXPECT_EQ(detect_trough(s, 1)->epoch, 4);
  EXPECT_EQ(detect_trough(s, 4)->epoch, 5);
  EXPECT_FALSE(detect_trough(s, 6));
}

TEST(Recovery, Examples) {
  const EpochValue peak{2, 0.5};
  auto s = series({0.1, 0.5, 0.2, 0.6, 0.1, 0.6, 0.7, 0.8});
  // the run must start after the trough at epoch 5
  EXPECT_EQ(detect_recovery(s, peak, 3), 6);
  EXPECT_EQ(detect_recovery(s, peak, 1), 6);
  EXPECT_FALSE(detect_recovery(s, peak, 4));
  // equal to the peak is not above it
  EXPECT_FALSE(detect_recovery(series({0.1, 0.5, 0.2, 0.5, 0.5, 0.5}), peak, 3));
  EXPECT_THROW(detect_recovery(s, peak, 0), Error);
}

TEST(Plateau, Examples) {
  EXPECT_EQ(detect_plateau(series({0.1, 0.5, 0.96, 0.9, 1.0}), 0.95), 3);
  EXPECT_EQ(detect_plateau(series({0.1, 0.5, 0.96, 0.9, 1.0}), 1.0), 5);
  EXPECT_FALSE(detect_plateau(series({0.1, 0.0}), 0.95));
  EXPECT_FALSE(detect_plateau(series({}), 0.95));
  EXPECT_THROW(detect_plateau(series({1.0}), 0.0), Error);
  EXPECT_THROW(detect_plateau(series({1.0}), 1.5), Error);
}

TEST(Jaggedness, ClosedForms) {
  EXPECT_DOUBLE_EQ(jaggedness(series({0, 1, 2, 3, 4})), 0.25);
  EXPECT_DOUBLE_EQ(jaggedness(series({0, 1, 0, 1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(jaggedness(series({0.3, 0.3, 0.3})), 0.0);
  EXPECT_DOUBLE_EQ(jaggedness(series({0.3})), 0.0);
}

TEST(ClassifyRun, Labels) {
  DetectorConfig cfg;
  EXPECT_EQ(classify_run(series({0.1, 0.2, 0.3, 0.4, 0.5}), cfg).label, PhaseLabel::monotonic);
  EXPECT_EQ(classify_run(series({0.1, 0.4, 0.1, 0.05, 0.3, 0.5, 0.6, 0.6}), cfg).label, PhaseLabel::peak_drop_recovery);
  EXPECT_EQ(classify_run(series({0.1, 0.4, 0.1, 0.05, 0.1, 0.2, 0.2, 0.2}), cfg).label,
            PhaseLabel::peak_drop_no_recovery);
  EXPECT_EQ(classify_run(series({0.5}), cfg).label, PhaseLabel::flat);
  EXPECT_EQ(classify_run(series({}), cfg).label, PhaseLabel::flat);
  // no strict interior peak and a final value well below the maximum
  std::vector<double> decline;
  for (int i = 0; i < 30; ++i) decline.push_back(0.5 - 0.01 * i);
  auto flat = classify_run(series(decline), cfg);
  EXPECT_FALSE(flat.jagged);
  EXPECT_EQ(flat.label, PhaseLabel::flat);
  auto jagged = classify_run(series({0.5, 0.5, 0.5, 0.1}), cfg);
  EXPECT_TRUE(jagged.jagged);
  EXPECT_EQ(jagged.label, PhaseLabel::jagged);
}

TEST(ClassifyRun, InvalidConfig) {
  DetectorConfig even;
  even.window = 4;
  EXPECT_THROW(classify_run(series({0.1, 0.2}), even), Error);
  DetectorConfig frac;
  frac.plateau_fraction = 0.0;
  EXPECT_THROW(classify_run(series({0.1, 0.2}), frac), Error);
  DetectorConfig sustain;
  sustain.sustain = 0;
  EXPECT_THROW(sustain.validate(), Error);
}

TEST(PhaseLabels, FollowReport) {
  auto s = series({0.1, 0.4, 0.1, 0.05, 0.02, 0.5, 0.6, 0.6, 0.6, 0.6});
  auto r = classify_run(s);
  ASSERT_EQ(r.label, PhaseLabel::peak_drop_recovery);
  EXPECT_EQ(r.recovery_onset, 6);
  EXPECT_EQ(r.plateau_onset, 7);
  auto labels = phase_labels(s, r);
  EXPECT_EQ(labels, (std::vector<std::string>{"rise", "rise", "drop", "drop", "drop", "recovery", "plateau", "plateau",
                                              "plateau", "plateau"}));
}

TEST(BestScore, EarliestOnTies) {
  EXPECT_EQ(best_score(series({0.1, 0.7, 0.3, 0.7})), (EpochValue{2, 0.7}));
  EXPECT_THROW(best_score(series({})), Error);
}

TEST(PredictOnset, Examples) {
  EXPECT_EQ(predict_onset({{1.0, 48}, {0.5, 106}}, 0.1), 530);
  EXPECT_EQ(predict_onset({{1.0, 32}, {0.5, 65}}, 0.1), 325);
  EXPECT_EQ(predict_onset({{0.5, 100}}, 0.5), 100);
  EXPECT_THROW(predict_onset({}, 0.1), Error);
  EXPECT_THROW(predict_onset({{1.0, 10}}, 0.0), Error);
}

TEST(RunMetaFile, ParseAndValidate) {
  std::istringstream ok("checkpoint,run_id,train_fraction\nbase,r1,0.5\n");
  auto m = parse_run_meta(ok);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].run_id, "r1");
  EXPECT_EQ(m[0].checkpoint, "base");
  std::istringstream bad("run_id,checkpoint,train_fraction\nr1,base,1.5\n");
  EXPECT_THROW(parse_run_meta(bad), Error);
  std::istringstream dup("run_id,checkpoint,train_fraction\nr1,base,1\nr1,base,0.5\n");
  EXPECT_THROW(parse_run_meta(dup), Error);
}

TEST(PeakTable, Ordering) {
  auto input = [](std::string run, std::string ckpt, double frac, std::optional<long> peak) {
    PeakInput p;
    p.meta = {std::move(run), std::move(ckpt), frac};
    if (peak) p.report.early_peak = EpochValue{*peak, 0.4};
    p.at_peak = {{Metric::rouge1, 0.4}};
    return p;
  };
  auto rows = peak_table({input("x2", "b", 1.0, 3), input("x1", "b", 0.5, std::nullopt), input("a9", "a", 1.0, 7),
                          input("a1", "a", 1.0, 2)});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].run_id, "a1");
  EXPECT_EQ(rows[1].run_id, "a9");
  EXPECT_EQ(rows[2].run_id, "x1");
  EXPECT_FALSE(rows[2].peak_epoch);
  EXPECT_TRUE(rows[2].at_peak.empty());
  EXPECT_EQ(rows[3].peak_epoch, 3);
}

TEST(Fixture, MatchesExpectedTable) {
  std::ifstream in(std::string(RADSUM_FIXTURES) + "/history_expected.json");
  const auto expected = nlohmann::json::parse(in);
  const auto meta = load_run_meta(std::string(RADSUM_FIXTURES) + "/history_meta.csv");
  std::map<std::string, std::vector<std::pair<double, long>>> onsets;
  for (const auto& [run, e] : expected["runs"].items()) {
    const auto& s = fixture_series(run);
    auto r = classify_run(s);
    ASSERT_TRUE(r.early_peak) << run;
    EXPECT_EQ(r.early_peak->epoch, e["early_peak"]["epoch"].get<long>()) << run;
    EXPECT_NEAR(r.early_peak->value, e["early_peak"]["value"].get<double>(), 1e-9) << run;
    EXPECT_EQ(r.trough->epoch, e["trough"]["epoch"].get<long>()) << run;
    if (e["recovery_onset"].is_null()) {
      EXPECT_FALSE(r.recovery_onset) << run;
    } else {
      ASSERT_TRUE(r.recovery_onset) << run;
      EXPECT_EQ(*r.recovery_onset, e["recovery_onset"].get<long>()) << run;
      onsets[e["checkpoint"]].emplace_back(e["train_fraction"].get<double>(), *r.recovery_onset);
    }
    EXPECT_EQ(r.plateau_onset, e["plateau_onset"].get<long>()) << run;
    EXPECT_EQ(best_score(s).epoch, e["best"]["epoch"].get<long>()) << run;
    EXPECT_STREQ(to_string(r.label), e["label"].get<std::string>().c_str()) << run;
    // the other metrics are recorded at the peak epoch too
    auto at = values_at(fixture_history(), run, r.early_peak->epoch);
    EXPECT_EQ(at.size(), 4u) << run;
  }
  for (const auto& [ckpt, e] : expected["onsets"].items()) {
    EXPECT_EQ(predict_onset(onsets.at(ckpt), e["target"].get<double>()), e["estimate"].get<long>()) << ckpt;
  }
  EXPECT_EQ(meta.size(), expected["runs"].size());
}

// --- Properties -------------------------------------------------------------

TEST(HistoryProperty, ScaleAndShiftInvariance) {
  testgen::Rng rng(41);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_grid_series(rng, 25);
    const double scale = std::ldexp(1.0, static_cast<int>(testgen::uniform(rng, 0, 4)) - 2);
    const double shift = static_cast<double>(testgen::uniform(rng, 0, 6)) - 3.0;
    const double prom = static_cast<double>(testgen::uniform(rng, 0, 8)) / 64.0;
    const auto t = transformed(s, scale, shift);
    auto p1 = detect_early_peak(s, 3, prom);
    auto p2 = detect_early_peak(t, 3, prom * scale);
    ASSERT_EQ(p1.has_value(), p2.has_value());
    if (p1) {
      ASSERT_EQ(p1->epoch, p2->epoch);
      auto tr1 = detect_trough(s, p1->epoch);
      auto tr2 = detect_trough(t, p2->epoch);
      ASSERT_EQ(tr1.has_value(), tr2.has_value());
      if (tr1) ASSERT_EQ(tr1->epoch, tr2->epoch);
      ASSERT_EQ(detect_recovery(s, *p1, 3), detect_recovery(t, *p2, 3));
    }
    ASSERT_NEAR(jaggedness(s), jaggedness(t), 1e-12);
    ASSERT_EQ(detect_plateau(s, 0.9), detect_plateau(transformed(s, scale, 0.0), 0.9));
  }
}

TEST(HistoryProperty, PlateauAtFullFraction) {
  testgen::Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_grid_series(rng, 25);
    auto onset = detect_plateau(s, 1.0);
    if (s.points.empty() || s.points.back().value <= 0.0) {
      ASSERT_FALSE(onset);
      continue;
    }
    ASSERT_TRUE(onset);
    const double final_value = s.points.back().value;
    for (const auto& p : s.points) {
      if (p.epoch < *onset) ASSERT_LT(p.value, final_value);
      if (p.epoch == *onset) ASSERT_GE(p.value, final_value);
    }
  }
}

TEST(HistoryProperty, ClassifyIsTotalAndConsistent) {
  testgen::Rng rng(43);
  for (int i = 0; i < 10000; ++i) {
    auto s = random_grid_series(rng, 30);
    DetectorConfig cfg;
    cfg.window = static_cast<int>(2 * testgen::uniform(rng, 0, 2) + 1);
    cfg.sustain = testgen::uniform(rng, 1, 4);
    PhaseReport r;
    ASSERT_NO_THROW(r = classify_run(s, cfg));
    if (r.recovery_onset) {
      ASSERT_TRUE(r.early_peak && r.trough);
      ASSERT_LT(r.early_peak->epoch, r.trough->epoch);
      ASSERT_LT(r.trough->epoch, *r.recovery_onset);
      ASSERT_EQ(r.label, PhaseLabel::peak_drop_recovery);
    }
    if (r.early_peak && !r.recovery_onset) ASSERT_EQ(r.label, PhaseLabel::peak_drop_no_recovery);
    ASSERT_GE(r.jaggedness, 0.0);
    ASSERT_LE(r.jaggedness, 1.0 + 1e-12);
    ASSERT_EQ(phase_labels(s, r).size(), s.points.size());
  }
}

TEST(HistoryProperty, PredictOnsetMonotone) {
  testgen::Rng rng(44);
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::pair<double, long>> obs;
    const std::size_t n = testgen::uniform(rng, 1, 4);
    for (std::size_t k = 0; k < n; ++k) {
      obs.emplace_back(static_cast<double>(testgen::uniform(rng, 1, 10)) / 10.0,
                       static_cast<long>(testgen::uniform(rng, 1, 500)));
    }
    const double a = static_cast<double>(testgen::uniform(rng, 1, 100)) / 100.0;
    const double b = static_cast<double>(testgen::uniform(rng, 1, 100)) / 100.0;
    const long pa = predict_onset(obs, a), pb = predict_onset(obs, b);
    if (a <= b) ASSERT_GE(pa, pb);
    // a predicted onset is never earlier than an observation at a larger fraction implies
    for (const auto& [f, onset] : obs) {
      if (f == a) ASSERT_GE(pa, onset);
    }
  }
}
