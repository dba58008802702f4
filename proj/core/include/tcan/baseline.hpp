#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tcan/cascade.hpp"
#include "tcan/metrics.hpp"

namespace tcan {

/// Number of equal sub-intervals of [0, t_obs] used for cumulative counts;
/// counts are taken at the interior boundaries (the last one equals size).
inline constexpr std::size_t kPopularityBins = 6;

/// Raw hand-crafted features of one observed cascade.
struct CascadeFeatures {
  /// Mean of child join time minus parent join time over non-root nodes.
  double mean_interval = 0.0;
  double size = 0.0;
  /// Joins at or before t_obs * k / kPopularityBins, k = 1..kPopularityBins-1.
  std::vector<double> cumulative;
  double leaf_count = 0.0;
  /// Mean out-degree of nodes that have at least one child.
  double mean_degree = 0.0;
  /// Depths of non-root nodes (root depth 0).
  double mean_path_length = 0.0;
  double max_path_length = 0.0;

  /// Regression inputs: log2(x + 1) on counts, the rest as is.
  std::vector<double> design_row() const;
};

CascadeFeatures extract_features(const CascadeViews& v);
std::vector<std::string> feature_names();

/// argmin ||y - X w||^2 + lambda ||w||^2 via the normal equations and a
/// Cholesky factorization. Throws NumericalError if the system is not
/// positive definite.
std::vector<double> ridge_solve(std::span<const std::vector<double>> x, std::span<const double> y, double lambda);

/// Ridge on z-scored columns with an unpenalized intercept.
struct RidgeModel {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double intercept = 0.0;
  double lambda = 0.0;

  double predict(std::span<const double> row) const;
};

struct RidgeFit {
  RidgeModel model;
  std::vector<std::string> warnings;
};

/// On a singular system lambda is raised (x10, starting at 1e-8) until the
/// factorization succeeds; each raise adds a warning.
RidgeFit fit_ridge(std::span<const std::vector<double>> x, std::span<const double> y, double lambda);

struct BaselineResult {
  EvalReport report;
  RidgeModel model;
  std::vector<std::string> warnings;
};

/// Fits log2(y + 1) on the training views and reports test metrics. A
/// negative lambda selects from {0.01, 0.02, ..., 1} by validation MSLE.
BaselineResult feature_baseline(const DatasetSplit& split, double lambda);

/// Constant predictor 2^mean(log2(y + 1)) - 1 over the training labels,
/// reported on the test views.
EvalReport geometric_mean_baseline(const DatasetSplit& split);

}  // namespace tcan
