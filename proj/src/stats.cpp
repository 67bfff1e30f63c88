#include "radsum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "radsum/error.hpp"

namespace radsum {

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorKind::EmptyInput, "quantile of empty data");
  double pos = (static_cast<double>(sorted.size()) - 1.0) * q;
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LengthStats length_stats(std::span<const std::size_t> lengths, std::span<const std::string> ids) {
  if (lengths.empty()) throw Error(ErrorKind::EmptyInput, "length_stats: no lengths");
  if (lengths.size() != ids.size()) {
    throw Error(ErrorKind::InvalidArgument, "length_stats: lengths and ids differ in size");
  }

  std::vector<double> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());

  LengthStats s;
  s.n = sorted.size();
  // Integer sum keeps the mean independent of input order.
  std::size_t total = std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  s.mean = static_cast<double>(total) / static_cast<double>(s.n);
  s.q1 = sorted_quantile(sorted, 0.25);
  s.median = sorted_quantile(sorted, 0.5);
  s.q3 = sorted_quantile(sorted, 0.75);
  s.iqr = s.q3 - s.q1;

  const double fence_lo = s.q1 - 1.5 * s.iqr;
  const double fence_hi = s.q3 + 1.5 * s.iqr;
  s.whisker_lo = *std::find_if(sorted.begin(), sorted.end(), [&](double v) { return v >= fence_lo; });
  s.whisker_hi = *std::find_if(sorted.rbegin(), sorted.rend(), [&](double v) { return v <= fence_hi; });

  std::vector<std::pair<std::size_t, std::string>> outliers;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    double v = static_cast<double>(lengths[i]);
    if (v < s.whisker_lo || v > s.whisker_hi) outliers.emplace_back(lengths[i], ids[i]);
  }
  std::sort(outliers.begin(), outliers.end());
  for (auto& [len, id] : outliers) s.outlier_ids.push_back(std::move(id));
  return s;
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorKind::Degenerate, "silverman_bandwidth: need at least two values");
  }
  double sd = sample_sd(values);
  if (!(sd > 0.0)) throw Error(ErrorKind::Degenerate, "silverman_bandwidth: data has zero spread");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

double kde_at(std::span<const double> values, double bandwidth, double x) {
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double sum = 0.0;
  for (double xi : values) {
    double u = (x - xi) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return norm * sum;
}

KdeCurve kde(std::span<const double> values, double bandwidth, std::size_t grid_size) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw Error(ErrorKind::InvalidArgument, "kde: bandwidth must be positive");
  }
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "kde: no values");
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "kde: grid_size must be at least 2");

  auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it - 3.0 * bandwidth;
  const double hi = *max_it + 3.0 * bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);

  KdeCurve curve;
  curve.bandwidth = bandwidth;
  curve.grid.reserve(grid_size);
  curve.density.reserve(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    double x = (i + 1 == grid_size) ? hi : lo + step * static_cast<double>(i);
    curve.grid.push_back(x);
    curve.density.push_back(kde_at(values, bandwidth, x));
  }
  return curve;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size() && i < y.size(); ++i) {
    area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return area;
}

}  // namespace radsum
