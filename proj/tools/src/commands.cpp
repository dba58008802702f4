#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config_file.hpp"
#include "manifest.hpp"
#include "split_io.hpp"
#include "tcan/baseline.hpp"
#include "tcan/checkpoint.hpp"
#include "tcan/error.hpp"
#include "tcan/synthgen.hpp"
#include "tcan/trainer.hpp"

namespace tcan::cli {

namespace fs = std::filesystem;

namespace {

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::to_string(v);
}

json load_model_json(const std::string& config_path, const std::map<std::string, std::string>& overrides) {
  json j = config_path.empty() ? json::object() : read_config_file(config_path);
  apply_overrides(j, overrides);
  return j;
}

json metrics_json(const EvalReport& r) { return {{"msle", r.msle}, {"mae", r.mae}, {"r2", r.r2}}; }

std::vector<json> tensor_rows(const Tensor& t) {
  std::vector<json> rows;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    auto r = t.row_span(i);
    rows.emplace_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

std::vector<double> flat(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

int cmd_gen(const GenArgs& a) {
  json j = a.config.empty() ? json::object() : read_config_file(a.config);
  apply_overrides(j, a.overrides);
  const GenConfig cfg = gen_config_from(j);
  RunManifest manifest("gen");
  if (!a.config.empty()) manifest.add_input(a.config);
  spdlog::info("generating {} cascades (seed {})", cfg.n_cascades, cfg.seed);
  const auto cascades = generate(cfg);
  fs::path out(a.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  write_cascade_file(a.out, cascades);
  std::size_t nodes = 0;
  for (const auto& c : cascades) nodes += c.size();
  spdlog::info("wrote {} cascades, {} records to {}", cascades.size(), nodes, a.out);
  manifest.set_config(gen_config_to_json(cfg));
  manifest.set_seed(cfg.seed);
  manifest.add_output(a.out);
  manifest.write(a.out + ".manifest.json");
  return kOk;
}

int cmd_prepare(const PrepareArgs& a) {
  if (a.t_obs.has_value() == a.t_obs_quantile.has_value()) {
    throw ValidationError("prepare needs exactly one of --t-obs or --t-obs-quantile");
  }
  if (a.ratios.size() != 3) throw ValidationError("--ratios takes three values");
  RunManifest manifest("prepare");
  manifest.add_input(a.input);
  std::vector<Cascade> cascades = read_cascade_file(a.input);
  const std::size_t parsed = cascades.size();
  if (a.publish_lo || a.publish_hi) {
    if (!a.publish_lo || !a.publish_hi) throw ValidationError("--publish-lo and --publish-hi go together");
    cascades = filter_publish_window(std::move(cascades), *a.publish_lo, *a.publish_hi, a.publish_period);
  }
  const double t_obs = a.t_obs ? *a.t_obs : join_time_quantile(cascades, *a.t_obs_quantile);
  std::vector<Cascade> kept;
  std::vector<CascadeViews> views;
  for (auto& c : cascades) {
    CascadeViews v = build_views(c, t_obs, a.t_end);
    if (v.observed_size >= a.min_obs) {
      kept.push_back(std::move(c));
      views.push_back(std::move(v));
    }
  }
  if (kept.empty()) throw ValidationError("no cascade survives the observed-size filter");
  const SplitRatios ratios{a.ratios[0], a.ratios[1], a.ratios[2]};
  const auto idx = split_indices(kept.size(), ratios, a.seed);
  std::vector<Cascade> parts[3];
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i : idx[s]) parts[s].push_back(kept[i]);
  }
  SplitSpec spec{t_obs, a.t_end, a.min_obs, ratios, a.seed};
  write_split(a.out_dir, spec, parts);
  spdlog::info("t_obs={} kept {}/{} cascades: train {}, val {}, test {}", t_obs, kept.size(), parsed,
               parts[0].size(), parts[1].size(), parts[2].size());
  manifest.set_config({{"t_obs", t_obs},
                       {"t_end", a.t_end},
                       {"min_obs", a.min_obs},
                       {"ratios", a.ratios},
                       {"t_obs_quantile", a.t_obs_quantile ? json(*a.t_obs_quantile) : json(nullptr)}});
  manifest.set_seed(a.seed);
  for (const char* p : kSplitParts) manifest.add_output(part_path(a.out_dir, p));
  manifest.add_output(join_path(a.out_dir, "split.json"));
  manifest.write(join_path(a.out_dir, "manifest.json"));
  return kOk;
}

int cmd_train(const TrainArgs& a) {
  const ModelConfig cfg = model_config_from(load_model_json(a.config, a.overrides));
  RunManifest manifest("train");
  if (!a.config.empty()) manifest.add_input(a.config);
  for (const char* p : kSplitParts) manifest.add_input(part_path(a.split_dir, p));
  manifest.add_input(join_path(a.split_dir, "split.json"));
  const DatasetSplit split = load_split(a.split_dir);
  spdlog::info("training {} on {} train / {} val cascades", to_string(cfg.variant), split.train.size(),
               split.val.size());
  TrainResult r = train(split, cfg, [](const EpochRecord& e) {
    spdlog::info("epoch {:3d} steps {:5d} train_loss {:.6f} val_msle {:.6f}{}", e.epoch, e.steps, e.train_loss,
                 e.val_msle, e.improved ? " *" : "");
    return true;
  });
  ensure_dir(a.out_dir);
  const std::string ck_path = join_path(a.out_dir, "checkpoint.json");
  write_checkpoint(ck_path, r.model->to_checkpoint());

  json hist{{"best_epoch", r.history.best_epoch},
            {"best_val_msle", r.history.best_val_msle},
            {"steps", r.history.steps},
            {"early_stopped", r.history.early_stopped}};
  std::ostringstream csv;
  csv << "epoch,steps,train_loss,val_msle,improved\n";
  json epochs = json::array();
  for (const auto& e : r.history.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"steps", e.steps},
                      {"train_loss", e.train_loss},
                      {"val_msle", e.val_msle},
                      {"improved", e.improved}});
    csv << e.epoch << ',' << e.steps << ',' << fmt_double(e.train_loss) << ',' << fmt_double(e.val_msle) << ','
        << (e.improved ? 1 : 0) << '\n';
  }
  hist["epochs"] = std::move(epochs);
  const std::string hist_json = join_path(a.out_dir, "history.json");
  const std::string hist_csv = join_path(a.out_dir, "history.csv");
  write_text_file(hist_json, hist.dump(2) + "\n");
  write_text_file(hist_csv, csv.str());
  spdlog::info("best epoch {} (val msle {:.6f}); checkpoint {}", r.history.best_epoch, r.history.best_val_msle,
               ck_path);

  manifest.set_config(json::parse(cfg.to_json()));
  manifest.set_seed(cfg.seed);
  for (const auto& p : {ck_path, hist_json, hist_csv}) manifest.add_output(p);
  manifest.write(join_path(a.out_dir, "manifest.json"));
  return kOk;
}

int cmd_eval(const EvalArgs& a) {
  RunManifest manifest("eval");
  manifest.add_input(a.checkpoint);
  const auto model = TcanModel::from_checkpoint(read_checkpoint(a.checkpoint));
  const DatasetSplit split = load_split(a.split_dir);
  const std::vector<CascadeViews>* views = nullptr;
  if (a.part == "train") {
    views = &split.train;
  } else if (a.part == "val") {
    views = &split.val;
  } else if (a.part == "test") {
    views = &split.test;
  } else {
    throw ValidationError("--part must be train, val or test");
  }
  manifest.add_input(part_path(a.split_dir, a.part));
  const EvalReport rep = evaluate(*model, *views, a.workers);
  spdlog::info("{} cascades ({}): msle {:.6f} mae {:.6f} r2 {:.6f}", rep.predictions.size(), a.part, rep.msle,
               rep.mae, rep.r2);
  ensure_dir(a.out_dir);
  const std::string report = join_path(a.out_dir, "report.json");
  const std::string preds = join_path(a.out_dir, "predictions.csv");
  write_text_file(report, rep.to_json() + "\n");
  write_text_file(preds, rep.predictions_csv());
  manifest.set_config({{"part", a.part}, {"workers", a.workers}, {"model", json::parse(model->config().to_json())}});
  manifest.set_seed(model->config().seed);
  manifest.add_output(report);
  manifest.add_output(preds);
  manifest.write(join_path(a.out_dir, "manifest.json"));
  return kOk;
}

int cmd_predict(const PredictArgs& a) {
  RunManifest manifest("predict");
  manifest.add_input(a.checkpoint);
  manifest.add_input(a.input);
  const auto model = TcanModel::from_checkpoint(read_checkpoint(a.checkpoint));
  std::ostringstream csv;
  csv << "id,observed_size,y_hat\n";
  std::size_t n = 0;
  for (const auto& c : read_cascade_file(a.input)) {
    const CascadeViews v = build_views(c, a.t_obs, a.t_obs);
    csv << c.id << ',' << v.observed_size << ',' << fmt_double(model->predict(v)) << '\n';
    ++n;
  }
  fs::path out(a.out);
  if (out.has_parent_path()) ensure_dir(out.parent_path().string());
  write_text_file(a.out, csv.str());
  spdlog::info("wrote {} predictions to {}", n, a.out);
  manifest.set_config({{"t_obs", a.t_obs}});
  manifest.set_seed(model->config().seed);
  manifest.add_output(a.out);
  manifest.write(a.out + ".manifest.json");
  return kOk;
}

int cmd_gradcheck(const GradcheckArgs& a) {
  json j = load_model_json(a.config, a.overrides);
  j["seed"] = a.seed;
  const ModelConfig cfg = model_config_from(j);

  GenConfig g;
  g.n_cascades = 1;
  g.max_size = 5;
  g.min_size = 5;
  g.n_users = 100;
  g.seed = a.seed;
  const Cascade c = generate(g).front();
  const double t_last = c.records.back().join_time;
  const CascadeViews v = build_views(c, t_last, t_last + 1.0);
  const std::vector<CascadeViews> views{v};
  TcanModel model(cfg, Vocabulary::from_views(views), TimeScales::from_views(views));

  GradCheckOptions opts;
  opts.eps = a.eps;
  opts.max_coords_per_param = a.coords;
  opts.seed = a.seed;
  const auto results = model_grad_check(model, v, opts);

  bool ok = true;
  json out = json::array();
  std::printf("%-10s %8s %8s %14s\n", "module", "params", "coords", "max_rel_error");
  for (const auto& m : results) {
    std::size_t coords = 0;
    for (const auto& e : m.report.per_param) coords += e.coords_checked;
    const bool pass = m.report.max_rel_error < a.tolerance;
    ok = ok && pass;
    std::printf("%-10s %8zu %8zu %14.3e %s\n", m.module.c_str(), m.report.per_param.size(), coords,
                m.report.max_rel_error, pass ? "ok" : "FAIL");
    json params = json::array();
    for (const auto& e : m.report.per_param) {
      params.push_back({{"name", e.name}, {"coords", e.coords_checked}, {"max_rel_error", e.max_rel_error}});
    }
    out.push_back({{"module", m.module}, {"max_rel_error", m.report.max_rel_error}, {"params", params}});
  }
  if (!a.out.empty()) {
    RunManifest manifest("gradcheck");
    if (!a.config.empty()) manifest.add_input(a.config);
    write_text_file(a.out, json{{"tolerance", a.tolerance}, {"modules", out}}.dump(2) + "\n");
    manifest.set_config(json::parse(cfg.to_json()));
    manifest.set_seed(a.seed);
    manifest.add_output(a.out);
    manifest.write(a.out + ".manifest.json");
  }
  if (!ok) {
    spdlog::error("gradient check exceeded tolerance {}", a.tolerance);
    return kNumerical;
  }
  return kOk;
}

int cmd_explain(const ExplainArgs& a) {
  RunManifest manifest("explain");
  manifest.add_input(a.checkpoint);
  const auto model = TcanModel::from_checkpoint(read_checkpoint(a.checkpoint));

  std::optional<CascadeViews> found;
  if (!a.split_dir.empty()) {
    const DatasetSplit split = load_split(a.split_dir);
    for (const auto* part : {&split.train, &split.val, &split.test}) {
      for (const auto& v : *part) {
        if (v.cascade_id == a.cascade_id) found = v;
      }
    }
    manifest.add_input(join_path(a.split_dir, "split.json"));
  } else {
    if (a.input.empty() || !a.t_obs) throw ValidationError("explain needs --split-dir or --input with --t-obs");
    for (const auto& c : read_cascade_file(a.input)) {
      if (c.id == a.cascade_id) found = build_views(c, *a.t_obs, *a.t_obs);
    }
    manifest.add_input(a.input);
  }
  if (!found) throw ValidationError("cascade '" + a.cascade_id + "' not found");
  const CascadeViews& v = *found;

  AttentionTrace trace;
  Tape tape;
  ForwardResult r = model->forward(tape, v, false, nullptr, &trace);
  json attention = json::array();
  for (std::size_t l = 0; l < trace.alpha.size(); ++l) {
    for (std::size_t h = 0; h < trace.alpha[l].size(); ++h) {
      attention.push_back({{"layer", l}, {"head", h}, {"matrix", tensor_rows(trace.alpha[l][h])}});
    }
  }
  json out{{"cascade_id", v.cascade_id},
           {"node_order", v.graph.node_ids},
           {"join_times", v.sequence.times},
           {"attention", attention},
           {"graph_repr", flat(r.graph_repr.value())},
           {"sequence_repr", flat(r.sequence_repr.value())},
           {"cascade_repr", flat(r.cascade_repr.value())},
           {"log_prediction", r.output.value()[0]},
           {"prediction", popularity_from_log(r.output.value()[0])}};
  const Tensor& z = r.cascade_repr.value();
  double norm = 0.0;
  for (double x : z.data()) norm += x * x;
  norm = std::sqrt(norm);
  std::vector<double> unit(z.data().begin(), z.data().end());
  if (norm > 0.0) {
    for (double& x : unit) x /= norm;
  }
  out["cascade_repr_normalized"] = unit;
  if (const SequenceEncoder* csat = model->sequence_encoder(); csat && csat->has_attn_pool()) {
    Tape t2;
    Tensor weights;
    Var x = model->node_inputs(t2, v);
    csat->attn_pool(t2, csat->bilstm_stack(t2, x).states, &weights);
    out["sequence_attention"] = tensor_rows(weights);
  }
  fs::path op(a.out);
  if (op.has_parent_path()) ensure_dir(op.parent_path().string());
  write_text_file(a.out, out.dump(2) + "\n");
  spdlog::info("attention trace for {} ({} nodes) written to {}", v.cascade_id, v.graph.size(), a.out);
  manifest.set_config({{"cascade_id", a.cascade_id}});
  manifest.set_seed(model->config().seed);
  manifest.add_output(a.out);
  manifest.write(a.out + ".manifest.json");
  return kOk;
}

int cmd_baseline(const BaselineArgs& a) {
  RunManifest manifest("baseline");
  for (const char* p : kSplitParts) manifest.add_input(part_path(a.split_dir, p));
  const DatasetSplit split = load_split(a.split_dir);
  const BaselineResult res = feature_baseline(split, a.lambda);
  for (const auto& w : res.warnings) spdlog::warn("{}", w);
  const EvalReport geo = geometric_mean_baseline(split);
  spdlog::info("feature-linear (lambda {}): msle {:.6f} mae {:.6f} r2 {:.6f}", res.model.lambda, res.report.msle,
               res.report.mae, res.report.r2);
  spdlog::info("geometric mean: msle {:.6f}", geo.msle);
  ensure_dir(a.out_dir);
  const std::string report = join_path(a.out_dir, "report.json");
  const std::string preds = join_path(a.out_dir, "predictions.csv");
  json rep = json::parse(res.report.to_json());
  rep["lambda"] = res.model.lambda;
  rep["features"] = feature_names();
  rep["weights"] = res.model.weights;
  rep["intercept"] = res.model.intercept;
  rep["warnings"] = res.warnings;
  rep["geometric_mean"] = metrics_json(geo);
  write_text_file(report, rep.dump(2) + "\n");
  write_text_file(preds, res.report.predictions_csv());
  manifest.set_config({{"lambda", a.lambda}});
  manifest.set_seed(split.split_seed);
  manifest.add_output(report);
  manifest.add_output(preds);
  manifest.write(join_path(a.out_dir, "manifest.json"));
  return kOk;
}

}  // namespace tcan::cli
