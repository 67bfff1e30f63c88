#include "radsum/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "radsum/error.hpp"

namespace radsum {

std::array<double, 2> symmetric_eigenvalues(const Mat2& m) {
  const double a = m[0][0];
  const double d = m[1][1];
  const double b = m[0][1];
  const double half_trace = 0.5 * (a + d);
  const double disc = std::hypot(0.5 * (a - d), b);
  return {half_trace - disc, half_trace + disc};
}

GaussianModel2D fit_gaussian(std::span<const Vec2> points) {
  if (points.size() < 3) {
    throw Error(ErrorKind::InvalidArgument,
                "fit_gaussian: need at least 3 points, got " + std::to_string(points.size()));
  }
  const auto n = static_cast<double>(points.size());
  GaussianModel2D model;
  for (const auto& p : points) {
    model.mean.x += p.x;
    model.mean.y += p.y;
  }
  model.mean.x /= n;
  model.mean.y /= n;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - model.mean.x;
    const double dy = p.y - model.mean.y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  Mat2& cov = model.covariance;
  cov = {{{sxx / (n - 1.0), sxy / (n - 1.0)}, {sxy / (n - 1.0), syy / (n - 1.0)}}};

  const double trace = cov[0][0] + cov[1][1];
  if (!(trace > 0.0)) {
    throw Error(ErrorKind::Degenerate, "fit_gaussian: both coordinates have zero variance");
  }
  if (symmetric_eigenvalues(cov)[0] < 1e-8 * trace) {
    model.ridge = 1e-6 * trace;
    cov[0][0] += model.ridge;
    cov[1][1] += model.ridge;
  }

  const double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
  model.inverse_covariance = {{{cov[1][1] / det, -cov[0][1] / det}, {-cov[1][0] / det, cov[0][0] / det}}};
  return model;
}

double mahalanobis_sq(const GaussianModel2D& model, Vec2 point) {
  const double dx = point.x - model.mean.x;
  const double dy = point.y - model.mean.y;
  const Mat2& s = model.inverse_covariance;
  const double d2 = dx * (s[0][0] * dx + s[0][1] * dy) + dy * (s[1][0] * dx + s[1][1] * dy);
  return std::max(d2, 0.0);
}

std::size_t retained_count(std::size_t n, double percentile) {
  const double raw = percentile * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::min(k, n);
}

FilterResult filter_percentile(std::span<const LabeledPoint> points, double percentile,
                               const GaussianModel2D& model) {
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "filter_percentile: percentile must lie in (0, 1]");
  }
  std::vector<std::pair<double, const LabeledPoint*>> scored;
  scored.reserve(points.size());
  for (const auto& p : points) scored.emplace_back(mahalanobis_sq(model, p.point), &p);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second->id) < std::tie(b.first, b.second->id);
  });

  FilterResult result;
  result.percentile = percentile;
  const std::size_t keep = retained_count(points.size(), percentile);
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (i < keep) {
      result.retained_ids.push_back(scored[i].second->id);
      result.retained_d2.push_back(scored[i].first);
    } else {
      result.excluded_ids.push_back(scored[i].second->id);
      result.excluded_d2.push_back(scored[i].first);
    }
  }
  result.threshold_d2 = result.retained_d2.empty() ? 0.0 : result.retained_d2.back();
  return result;
}

std::size_t truncation_length(std::size_t max_word_tokens) {
  if (max_word_tokens == 0) throw Error(ErrorKind::InvalidArgument, "truncation_length: max must be positive");
  return (133 * max_word_tokens + 99) / 100;
}

}  // namespace radsum
