#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tcan/cascade.hpp"
#include "tcan/gradcheck.hpp"
#include "tcan/metrics.hpp"
#include "tcan/model.hpp"

namespace tcan {

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_msle = 0.0;
  std::size_t steps = 0;
  bool early_stopped = false;
  bool stopped_by_callback = false;
};

/// Called after every epoch; returning false ends training there.
using EpochCallback = std::function<bool(const EpochRecord&)>;

/// Squared log-space error (o - log2(y + 1))^2 of one forward output.
Var sample_loss(Tape& tape, Var output, double label);

/// Vocabulary over every split (unseen val/test users keep their random
/// feature rows) and time scales from the training views.
std::unique_ptr<TcanModel> build_model(const ModelConfig& cfg, const DatasetSplit& split);

/// Mini-batch training: per batch, mean sample loss, backward, one Adam
/// step. Validation MSLE is checked after every epoch; training stops after
/// max(patience, 1) consecutive epochs without improvement, at max_epochs,
/// once max_steps optimizer steps have been taken, or when `on_epoch`
/// returns false. The model is left holding the best-validation parameters.
TrainHistory train_model(TcanModel& model, std::span<const CascadeViews> train,
                         std::span<const CascadeViews> val, const EpochCallback& on_epoch = {});

struct TrainResult {
  std::unique_ptr<TcanModel> model;
  TrainHistory history;
};

TrainResult train(const DatasetSplit& split, const ModelConfig& cfg, const EpochCallback& on_epoch = {});

/// Eval-mode predictions and metrics, rows ordered by cascade id. `workers`
/// > 1 fans the forward passes out over threads; results do not depend on it.
EvalReport evaluate(const TcanModel& model, std::span<const CascadeViews> views, std::size_t workers = 1);

struct ModuleGradCheck {
  std::string module;
  GradCheckReport report;
};

/// Parameter-name prefixes grouped by module: features, te, cgat, csat, mlp.
std::vector<std::string> model_modules();

/// Central-difference check of sample_loss on one cascade (eval mode),
/// reported per module that is present in the model.
std::vector<ModuleGradCheck> model_grad_check(TcanModel& model, const CascadeViews& views,
                                              const GradCheckOptions& opts);

}  // namespace tcan
