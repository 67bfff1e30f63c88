#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace radsum {

/// Box-plot summary of a length distribution.
///
/// Quartiles use linear interpolation between order statistics at position
/// (n-1)*q. Whiskers are the most extreme data points within 1.5 IQR of the
/// box; outlier_ids holds the ids of points beyond them, ordered by
/// (length, id).
struct LengthStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<std::string> outlier_ids;

  bool operator==(const LengthStats&) const = default;
};

LengthStats length_stats(std::span<const std::size_t> lengths, std::span<const std::string> ids);

/// Quantile of already sorted data, interpolation type 7.
double sorted_quantile(std::span<const double> sorted, double q);

double sample_sd(std::span<const double> values);

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5). Falls back to sd when the IQR is zero
/// but the data still has spread.
double silverman_bandwidth(std::span<const double> values);

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};

/// Gaussian KDE evaluated on grid_size evenly spaced points spanning
/// [min - 3h, max + 3h].
KdeCurve kde(std::span<const double> values, double bandwidth, std::size_t grid_size = 512);

/// Density at one point; exposed for tests and custom grids.
double kde_at(std::span<const double> values, double bandwidth, double x);

double trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace radsum
