#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcan/autograd.hpp"
#include "tcan/cascade.hpp"
#include "tcan/config.hpp"

namespace tcan {

/// Attention weights of every CGAT layer and head: alpha[layer][head] is n x n.
struct AttentionTrace {
  std::vector<std::vector<Tensor>> alpha;
};

/// Dropout/trace plumbing shared by the encoders for one forward pass.
struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
  AttentionTrace* trace = nullptr;
};

/// Row i may attend column j iff j -> i is an edge (or either direction in
/// symmetric mode) or i == j.
Mask attention_mask(const CascadeGraph& g, MaskMode mode);

/// Parameters of one CGAT layer. Per-head projections are the column blocks
/// of w_q / w_k / w_v (width x width, head h owns columns
/// [h * d_head, (h + 1) * d_head)).
struct CGATLayerParams {
  Parameter* w_q = nullptr;
  Parameter* w_k = nullptr;
  Parameter* w_v = nullptr;
  Parameter* w_o = nullptr;
  Parameter* ffn_w1 = nullptr;
  Parameter* ffn_b1 = nullptr;
  Parameter* ffn_w2 = nullptr;
  Parameter* ffn_b2 = nullptr;
  Parameter* ln_gain = nullptr;
  Parameter* ln_bias = nullptr;
  /// Only present in ResidualMode::Conventional.
  Parameter* ln2_gain = nullptr;
  Parameter* ln2_bias = nullptr;
};

/// Stack of adjacency-masked multi-head self-attention layers with a
/// sum-pool readout. Parameters live under `cgat.layer{l}.*`.
class GraphEncoder {
 public:
  GraphEncoder(ParameterStore& store, std::size_t width, std::size_t layers, std::size_t heads,
               ResidualMode residual);

  void initialize(std::uint64_t seed);

  std::size_t width() const { return width_; }
  std::size_t heads() const { return heads_; }
  std::size_t num_layers() const { return layers_.size(); }
  const CGATLayerParams& layer_params(std::size_t l) const { return layers_.at(l); }

  /// Multi-head masked attention, heads concatenated and projected by w_o.
  /// Logits are scaled by 1/sqrt(width).
  Var attend(Tape& tape, Var x, const Mask& mask, std::size_t layer, const ForwardContext& ctx) const;
  /// attend + FFN + residual + LayerNorm per the configured residual mode.
  Var layer(Tape& tape, Var x, const Mask& mask, std::size_t layer, const ForwardContext& ctx) const;
  /// Final-layer node representations (n x width).
  Var encode_nodes(Tape& tape, Var x, const Mask& mask, const ForwardContext& ctx) const;
  /// Column-wise sum of encode_nodes: the 1 x width graph vector.
  Var encode(Tape& tape, Var x, const Mask& mask, const ForwardContext& ctx) const;

 private:
  std::size_t width_;
  std::size_t heads_;
  ResidualMode residual_;
  std::vector<CGATLayerParams> layers_;
};

}  // namespace tcan
