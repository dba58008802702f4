#include "tcan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <exception>

#include "tcan/error.hpp"
#include "tcan/optim.hpp"

namespace tcan {

Var sample_loss(Tape& tape, Var output, double label) {
  Var diff = ag::sub(output, tape.constant(Tensor::scalar(log2p1(label))));
  return ag::mul(diff, diff);
}

std::unique_ptr<TcanModel> build_model(const ModelConfig& cfg, const DatasetSplit& split) {
  if (split.train.empty()) throw ValidationError("training split is empty");
  std::vector<CascadeViews> all;
  std::vector<NodeId> ids;
  std::unordered_map<NodeId, bool> seen;
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (const auto& v : *part) {
      for (const auto& id : v.graph.node_ids) {
        if (seen.emplace(id, true).second) ids.push_back(id);
      }
    }
  }
  return std::make_unique<TcanModel>(cfg, Vocabulary(std::move(ids)), TimeScales::from_views(split.train));
}

TrainHistory train_model(TcanModel& model, std::span<const CascadeViews> train, std::span<const CascadeViews> val,
                         const EpochCallback& on_epoch) {
  if (train.empty()) throw ValidationError("training set is empty");
  if (val.empty()) throw ValidationError("validation set is empty");
  const ModelConfig& cfg = model.config();
  AdamHyper hyper;
  hyper.lr = cfg.lr;
  hyper.weight_decay = cfg.weight_decay;
  hyper.validate();

  std::vector<Parameter*> params = model.params().all();
  model.params().zero_grad();
  Rng shuffle_rng = make_stream(cfg.seed, "shuffle");
  Rng dropout_rng = make_stream(cfg.seed, "dropout");

  TrainHistory hist;
  hist.best_val_msle = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best = model.params().snapshot();
  std::size_t bad_epochs = 0;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t stop_after = std::max<std::size_t>(cfg.patience, 1);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle_rng, i)]);

    double loss_sum = 0.0;
    bool step_cap = false;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const CascadeViews& v = train[order[k]];
        Tape tape;
        ForwardResult r = model.forward(tape, v, true, &dropout_rng);
        Var loss = sample_loss(tape, r.output, static_cast<double>(v.label));
        const double lv = loss.value()[0];
        if (!std::isfinite(lv)) {
          throw NumericalError("training loss diverged at epoch " + std::to_string(epoch) + " on cascade " +
                               v.cascade_id);
        }
        loss_sum += lv;
        tape.backward(ag::scale(loss, inv_b));
      }
      adam_step(params, hyper, static_cast<std::int64_t>(++hist.steps));
      if (cfg.max_steps > 0 && hist.steps >= cfg.max_steps) {
        step_cap = true;
        break;
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.steps = hist.steps;
    rec.train_loss = loss_sum / static_cast<double>(train.size());
    rec.val_msle = evaluate(model, val).msle;
    if (!std::isfinite(rec.val_msle)) throw NumericalError("validation MSLE is not finite");
    rec.improved = rec.val_msle < hist.best_val_msle;
    if (rec.improved) {
      hist.best_val_msle = rec.val_msle;
      hist.best_epoch = epoch;
      best = model.params().snapshot();
      bad_epochs = 0;
    } else {
      ++bad_epochs;
    }
    hist.epochs.push_back(rec);
    if (on_epoch && !on_epoch(rec)) {
      hist.stopped_by_callback = true;
      break;
    }
    if (bad_epochs >= stop_after) {
      hist.early_stopped = true;
      break;
    }
    if (step_cap) break;
  }
  model.params().restore(best);
  model.params().zero_grad();
  return hist;
}

TrainResult train(const DatasetSplit& split, const ModelConfig& cfg, const EpochCallback& on_epoch) {
  TrainResult r;
  r.model = build_model(cfg, split);
  r.history = train_model(*r.model, split.train, split.val, on_epoch);
  return r;
}

EvalReport evaluate(const TcanModel& model, std::span<const CascadeViews> views, std::size_t workers) {
  if (views.empty()) throw ValidationError("evaluate needs at least one cascade");
  std::vector<PredictionRow> rows(views.size());
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < views.size(); i += stride) {
      rows[i] = {views[i].cascade_id, static_cast<double>(views[i].label), model.predict(views[i])};
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, views.size());
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PredictionRow& a, const PredictionRow& b) { return a.id < b.id; });
  return make_report(std::move(rows));
}

std::vector<std::string> model_modules() { return {"features", "te", "cgat", "csat", "mlp"}; }

std::vector<ModuleGradCheck> model_grad_check(TcanModel& model, const CascadeViews& views,
                                              const GradCheckOptions& opts) {
  const double label = static_cast<double>(views.label);
  LossFn loss = [&](Tape& tape) { return sample_loss(tape, model.forward(tape, views, false).output, label); };
  std::vector<ModuleGradCheck> out;
  for (const auto& m : model_modules()) {
    std::vector<Parameter*> params = model.params().with_prefix(m + ".");
    if (params.empty()) continue;
    out.push_back({m, grad_check(loss, params, opts)});
  }
  return out;
}

}  // namespace tcan
