#include "tcan/model.hpp"

#include <cmath>

#include "json.hpp"
#include "tcan/error.hpp"
#include "tcan/init.hpp"

namespace tcan {

using nlohmann::json;

Vocabulary::Vocabulary(std::vector<NodeId> ids) : ids_(std::move(ids)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw ValidationError("duplicate vocabulary id '" + ids_[i] + "'");
  }
}

Vocabulary Vocabulary::from_views(std::span<const CascadeViews> views) {
  std::vector<NodeId> ids;
  std::unordered_map<NodeId, std::size_t> seen;
  for (const auto& v : views) {
    for (const auto& id : v.graph.node_ids) {
      if (seen.emplace(id, ids.size()).second) ids.push_back(id);
    }
  }
  return Vocabulary(std::move(ids));
}

std::size_t Vocabulary::index(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("node id '" + id + "' is not in the model vocabulary");
  return it->second;
}

double popularity_from_log(double o) { return std::max(std::exp2(o) - 1.0, 0.0); }

TcanModel::TcanModel(const ModelConfig& cfg, Vocabulary vocab, const TimeScales& scales)
    : cfg_(cfg), vocab_(std::move(vocab)), scales_(scales) {
  cfg_.validate();
  if (vocab_.size() == 0) throw ValidationError("model vocabulary is empty");
  features_ = &store_.add("features.F", Tensor(vocab_.size(), cfg_.d));
  {
    Rng rng = init::stream_for(cfg_.seed, features_->name);
    features_->value = init::standard_normal(vocab_.size(), cfg_.d, rng);
  }
  if (cfg_.uses_time()) {
    te_.emplace(store_, cfg_.periodic_dim(), cfg_.uses_sqrt_channel());
    TimeScales s = scales_;
    if (cfg_.normalize_time) s = {scales_.min_gap / scales_.t_obs, scales_.max_gap / scales_.t_obs, 1.0};
    te_->initialize(s, cfg_.seed);
  }
  if (cfg_.uses_graph()) {
    cgat_.emplace(store_, cfg_.width(), cfg_.cgat_layers, cfg_.heads, cfg_.residual);
    cgat_->initialize(cfg_.seed);
  }
  if (cfg_.uses_sequence()) {
    csat_.emplace(store_, cfg_.width(), cfg_.d_h, cfg_.csat_layers, cfg_.uses_attn_pool());
    csat_->initialize(cfg_.seed);
  }
  std::size_t in = cfg_.mlp_input();
  std::vector<std::size_t> dims = cfg_.mlp_hidden;
  dims.push_back(1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::string p = "mlp.layer" + std::to_string(i) + ".";
    Parameter& w = store_.add(p + "w", Tensor(in, dims[i]));
    Parameter& b = store_.add(p + "b", Tensor(1, dims[i]));
    Rng rng = init::stream_for(cfg_.seed, w.name);
    w.value = init::xavier_uniform(in, dims[i], rng);
    mlp_.emplace_back(&w, &b);
    in = dims[i];
  }
}

Var TcanModel::node_inputs(Tape& tape, const CascadeViews& views) const {
  const auto& g = views.graph;
  const std::size_t n = g.size();
  if (n == 0) throw ValidationError("cascade " + views.cascade_id + " has no observed nodes");
  if (views.sequence.size() != n) throw ValidationError("sequence/graph size mismatch in " + views.cascade_id);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = vocab_.index(g.node_ids[i]);
  Var x = ag::gather_rows(tape.param(*features_), rows);
  if (!te_) return x;
  std::vector<double> times(n);
  for (std::size_t j = 0; j < n; ++j) times[views.sequence.nodes[j]] = views.sequence.times[j];
  if (cfg_.normalize_time) {
    for (double& t : times) t /= views.t_obs;
  }
  return fuse(x, te_->embed_sequence(tape, times));
}

ForwardResult TcanModel::forward(Tape& tape, const CascadeViews& views, bool training, Rng* dropout_rng,
                                 AttentionTrace* trace) const {
  if (training && cfg_.dropout > 0.0 && !dropout_rng) throw ValidationError("training forward needs a dropout rng");
  ForwardContext ctx;
  ctx.training = training;
  ctx.dropout = cfg_.dropout;
  ctx.rng = dropout_rng;
  ctx.trace = trace;

  Var x = node_inputs(tape, views);
  ForwardResult r;
  if (cgat_) {
    r.graph_repr = cgat_->encode(tape, x, attention_mask(views.graph, cfg_.mask), ctx);
  } else {
    r.graph_repr = tape.constant(Tensor(1, cfg_.width()));
  }
  if (csat_) {
    const auto& order = views.sequence.nodes;
    bool identity = true;
    for (std::size_t j = 0; j < order.size(); ++j) identity = identity && order[j] == j;
    Var xs = identity ? x : ag::gather_rows(x, order);
    r.sequence_repr = csat_->encode(tape, xs);
  } else {
    r.sequence_repr = tape.constant(Tensor(1, cfg_.d_h));
  }
  r.cascade_repr = ag::concat_cols({r.graph_repr, r.sequence_repr});

  Var z = r.cascade_repr;
  for (std::size_t i = 0; i < mlp_.size(); ++i) {
    z = ag::add_row(ag::matmul(z, tape.param(*mlp_[i].first)), tape.param(*mlp_[i].second));
    if (i + 1 < mlp_.size()) {
      z = ag::isru(z);
      if (training && cfg_.dropout > 0.0) z = ag::dropout(z, cfg_.dropout, true, *dropout_rng);
    }
  }
  r.output = z;
  return r;
}

double TcanModel::predict_log(const CascadeViews& views) const {
  Tape tape;
  return forward(tape, views, false).output.value()[0];
}

double TcanModel::predict(const CascadeViews& views) const { return popularity_from_log(predict_log(views)); }

Checkpoint TcanModel::to_checkpoint() const {
  json meta;
  meta["config"] = json::parse(cfg_.to_json());
  meta["vocabulary"] = vocab_.ids();
  meta["time_scales"] = {{"min_gap", scales_.min_gap}, {"max_gap", scales_.max_gap}, {"t_obs", scales_.t_obs}};
  return capture_parameters(store_, meta.dump());
}

std::unique_ptr<TcanModel> TcanModel::from_checkpoint(const Checkpoint& ck) {
  json meta = json::parse(ck.meta);
  if (!meta.contains("config") || !meta.contains("vocabulary") || !meta.contains("time_scales")) {
    throw ValidationError("checkpoint lacks model metadata");
  }
  const ModelConfig cfg = ModelConfig::from_json(meta["config"].dump());
  TimeScales scales;
  scales.min_gap = meta["time_scales"].at("min_gap").get<double>();
  scales.max_gap = meta["time_scales"].at("max_gap").get<double>();
  scales.t_obs = meta["time_scales"].at("t_obs").get<double>();
  auto model = std::make_unique<TcanModel>(cfg, Vocabulary(meta["vocabulary"].get<std::vector<NodeId>>()), scales);
  apply_parameters(ck, model->params());
  return model;
}

}  // namespace tcan
