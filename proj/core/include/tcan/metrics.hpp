#pragma once

#include <span>
#include <string>
#include <vector>

namespace tcan {

/// log2(x + 1); the shift keeps zero increments defined.
double log2p1(double x);

/// Mean over samples of (log2(y + 1) - log2(y_hat + 1))^2.
double msle_loss(std::span<const double> y, std::span<const double> y_hat);

struct Metrics {
  double msle = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
};

/// MSLE, MAE and R^2, all on the log2(. + 1) scale. When the targets have
/// zero variance R^2 is 1 for an exact fit and 0 otherwise.
Metrics compute_metrics(std::span<const double> y, std::span<const double> y_hat);

struct PredictionRow {
  std::string id;
  double y = 0.0;
  double y_hat = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double train_loss = 0.0;
  double val_msle = 0.0;
  bool improved = false;
};

struct EvalReport {
  double msle = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  std::vector<PredictionRow> predictions;
  std::vector<EpochRecord> curves;

  std::string to_json() const;
  /// id,y,y_hat with a header line.
  std::string predictions_csv() const;
};

/// Metrics over `rows`, which are kept in the report as given.
EvalReport make_report(std::vector<PredictionRow> rows);

}  // namespace tcan
