#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcan/autograd.hpp"
#include "tcan/cascade.hpp"
#include "tcan/checkpoint.hpp"
#include "tcan/config.hpp"
#include "tcan/graph_encoder.hpp"
#include "tcan/sequence_encoder.hpp"
#include "tcan/time_embedding.hpp"

namespace tcan {

/// Node id -> row of the feature matrix F. Fixed once the model is built.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<NodeId> ids);

  /// Every node id appearing in the observed windows, in first-seen order.
  static Vocabulary from_views(std::span<const CascadeViews> views);

  std::size_t size() const { return ids_.size(); }
  bool contains(const NodeId& id) const { return index_.contains(id); }
  /// Throws ValidationError for ids outside the vocabulary.
  std::size_t index(const NodeId& id) const;
  const std::vector<NodeId>& ids() const { return ids_; }

 private:
  std::vector<NodeId> ids_;
  std::unordered_map<NodeId, std::size_t> index_;
};

/// Forward-pass products. `output` is the 1 x 1 log-space prediction
/// o = log2(y_hat + 1).
struct ForwardResult {
  Var output;
  Var graph_repr;     ///< h^g (1 x width); zeros when the graph path is ablated
  Var sequence_repr;  ///< h^s (1 x d_h); zeros when the sequence path is ablated
  Var cascade_repr;   ///< [h^g | h^s]
};

/// The full model: feature lookup, time embedding, CGAT, CSAT and the MLP
/// head. Parameter names are stable across variants, so ablations built
/// with the same seed share initial values wherever shapes agree.
class TcanModel {
 public:
  TcanModel(const ModelConfig& cfg, Vocabulary vocab, const TimeScales& scales);
  TcanModel(const TcanModel&) = delete;
  TcanModel& operator=(const TcanModel&) = delete;

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const TimeScales& time_scales() const { return scales_; }
  ParameterStore& params() { return store_; }
  const ParameterStore& params() const { return store_; }

  const TimeEmbedding* time_embedding() const { return te_ ? &*te_ : nullptr; }
  const GraphEncoder* graph_encoder() const { return cgat_ ? &*cgat_ : nullptr; }
  const SequenceEncoder* sequence_encoder() const { return csat_ ? &*csat_ : nullptr; }

  /// Node features after fusion (n x width), in sequence order.
  Var node_inputs(Tape& tape, const CascadeViews& views) const;

  /// `dropout_rng` is required when training; `trace` collects CGAT
  /// attention weights when non-null.
  ForwardResult forward(Tape& tape, const CascadeViews& views, bool training, Rng* dropout_rng = nullptr,
                        AttentionTrace* trace = nullptr) const;

  /// Eval-mode log-space output o.
  double predict_log(const CascadeViews& views) const;
  /// Eval-mode popularity: max(2^o - 1, 0).
  double predict(const CascadeViews& views) const;

  Checkpoint to_checkpoint() const;
  static std::unique_ptr<TcanModel> from_checkpoint(const Checkpoint& ck);

 private:
  ModelConfig cfg_;
  Vocabulary vocab_;
  TimeScales scales_;
  ParameterStore store_;
  Parameter* features_ = nullptr;
  std::optional<TimeEmbedding> te_;
  std::optional<GraphEncoder> cgat_;
  std::optional<SequenceEncoder> csat_;
  std::vector<std::pair<Parameter*, Parameter*>> mlp_;
};

/// o-space output mapped to a popularity estimate: max(2^o - 1, 0).
double popularity_from_log(double o);

}  // namespace tcan
