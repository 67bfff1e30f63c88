#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace radsum {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Bivariate Gaussian over (findings length, impression length).
/// covariance already includes the ridge, if one was needed.
struct GaussianModel2D {
  Vec2 mean;
  Mat2 covariance{};
  Mat2 inverse_covariance{};
  double ridge = 0.0;
};

/// Sample mean and n-1 covariance. When the smallest eigenvalue falls below
/// 1e-8 * trace, 1e-6 * trace is added to the diagonal before inversion.
GaussianModel2D fit_gaussian(std::span<const Vec2> points);

std::array<double, 2> symmetric_eigenvalues(const Mat2& m);

double mahalanobis_sq(const GaussianModel2D& model, Vec2 point);

struct LabeledPoint {
  std::string id;
  Vec2 point;
};

struct FilterResult {
  std::vector<std::string> retained_ids;
  std::vector<std::string> excluded_ids;
  std::vector<double> retained_d2;  // parallel to retained_ids
  std::vector<double> excluded_d2;  // parallel to excluded_ids
  double threshold_d2 = 0.0;
  double percentile = 1.0;
};

/// ceil(percentile * n), robust to the binary representation of percentile.
std::size_t retained_count(std::size_t n, double percentile);

/// Keeps the ceil(percentile * n) points closest to the model mean, ordering
/// by (d2, id).
FilterResult filter_percentile(std::span<const LabeledPoint> points, double percentile,
                               const GaussianModel2D& model);

/// Padding/truncation budget: ceil(1.33 * max_word_tokens), in exact
/// integer arithmetic.
std::size_t truncation_length(std::size_t max_word_tokens);

}  // namespace radsum
