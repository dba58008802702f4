#include "tcan/graph_encoder.hpp"

#include <cmath>

#include "tcan/error.hpp"
#include "tcan/init.hpp"

namespace tcan {

Mask attention_mask(const CascadeGraph& g, MaskMode mode) {
  const std::size_t n = g.size();
  Mask m{n, n, std::vector<std::uint8_t>(n * n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool allowed = i == j || g.edge(j, i) || (mode == MaskMode::Symmetric && g.edge(i, j));
      m.bits[i * n + j] = allowed ? 1 : 0;
    }
  }
  return m;
}

GraphEncoder::GraphEncoder(ParameterStore& store, std::size_t width, std::size_t layers, std::size_t heads,
                           ResidualMode residual)
    : width_(width), heads_(heads), residual_(residual) {
  if (width == 0 || heads == 0 || width % heads != 0) {
    throw ValidationError("CGAT heads must divide the width");
  }
  if (layers == 0) throw ValidationError("CGAT needs at least one layer");
  const std::size_t inner = 2 * width;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string p = "cgat.layer" + std::to_string(l) + ".";
    CGATLayerParams lp;
    lp.w_q = &store.add(p + "w_q", Tensor(width, width));
    lp.w_k = &store.add(p + "w_k", Tensor(width, width));
    lp.w_v = &store.add(p + "w_v", Tensor(width, width));
    lp.w_o = &store.add(p + "w_o", Tensor(width, width));
    lp.ffn_w1 = &store.add(p + "ffn_w1", Tensor(width, inner));
    lp.ffn_b1 = &store.add(p + "ffn_b1", Tensor(1, inner));
    lp.ffn_w2 = &store.add(p + "ffn_w2", Tensor(inner, width));
    lp.ffn_b2 = &store.add(p + "ffn_b2", Tensor(1, width));
    lp.ln_gain = &store.add(p + "ln_gain", Tensor(1, width, 1.0));
    lp.ln_bias = &store.add(p + "ln_bias", Tensor(1, width));
    if (residual_ == ResidualMode::Conventional) {
      lp.ln2_gain = &store.add(p + "ln2_gain", Tensor(1, width, 1.0));
      lp.ln2_bias = &store.add(p + "ln2_bias", Tensor(1, width));
    }
    layers_.push_back(lp);
  }
}

void GraphEncoder::initialize(std::uint64_t seed) {
  for (auto& lp : layers_) {
    for (Parameter* w : {lp.w_q, lp.w_k, lp.w_v, lp.w_o, lp.ffn_w1, lp.ffn_w2}) {
      Rng rng = init::stream_for(seed, w->name);
      w->value = init::xavier_uniform(w->value.rows(), w->value.cols(), rng);
    }
    lp.ffn_b1->value.fill(0.0);
    lp.ffn_b2->value.fill(0.0);
    lp.ln_gain->value.fill(1.0);
    lp.ln_bias->value.fill(0.0);
    if (lp.ln2_gain) {
      lp.ln2_gain->value.fill(1.0);
      lp.ln2_bias->value.fill(0.0);
    }
  }
}

Var GraphEncoder::attend(Tape& tape, Var x, const Mask& mask, std::size_t l, const ForwardContext& ctx) const {
  const CGATLayerParams& lp = layers_.at(l);
  if (x.cols() != width_) {
    throw ValidationError("CGAT input width " + std::to_string(x.cols()) + ", expected " + std::to_string(width_));
  }
  if (mask.rows != x.rows() || mask.cols != x.rows()) throw ValidationError("CGAT mask does not match node count");
  const std::size_t d_head = width_ / heads_;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(width_));

  Var q = ag::matmul(x, tape.param(*lp.w_q));
  Var k = ag::matmul(x, tape.param(*lp.w_k));
  Var v = ag::matmul(x, tape.param(*lp.w_v));
  std::vector<Var> head_out;
  head_out.reserve(heads_);
  std::vector<Tensor> trace_layer;
  for (std::size_t h = 0; h < heads_; ++h) {
    Var qh = ag::slice_cols(q, h * d_head, d_head);
    Var kh = ag::slice_cols(k, h * d_head, d_head);
    Var vh = ag::slice_cols(v, h * d_head, d_head);
    Var logits = ag::scale(ag::matmul(qh, ag::transpose(kh)), inv_scale);
    Var alpha = ag::masked_softmax(logits, mask);
    if (ctx.trace) trace_layer.push_back(alpha.value());
    if (ctx.training && ctx.dropout > 0.0) alpha = ag::dropout(alpha, ctx.dropout, true, *ctx.rng);
    head_out.push_back(ag::matmul(alpha, vh));
  }
  if (ctx.trace) ctx.trace->alpha.push_back(std::move(trace_layer));
  Var heads = heads_ == 1 ? head_out.front() : ag::concat_cols(head_out);
  return ag::matmul(heads, tape.param(*lp.w_o));
}

Var GraphEncoder::layer(Tape& tape, Var x, const Mask& mask, std::size_t l, const ForwardContext& ctx) const {
  const CGATLayerParams& lp = layers_.at(l);
  auto ffn = [&](Var in) {
    Var hidden = ag::gelu(ag::add_row(ag::matmul(in, tape.param(*lp.ffn_w1)), tape.param(*lp.ffn_b1)));
    Var out = ag::add_row(ag::matmul(hidden, tape.param(*lp.ffn_w2)), tape.param(*lp.ffn_b2));
    if (ctx.training && ctx.dropout > 0.0) out = ag::dropout(out, ctx.dropout, true, *ctx.rng);
    return out;
  };
  Var attn = attend(tape, x, mask, l, ctx);
  if (residual_ == ResidualMode::AsWritten) {
    return ag::layernorm(ag::add(ffn(attn), x), tape.param(*lp.ln_gain), tape.param(*lp.ln_bias));
  }
  Var h = ag::layernorm(ag::add(attn, x), tape.param(*lp.ln_gain), tape.param(*lp.ln_bias));
  return ag::layernorm(ag::add(ffn(h), h), tape.param(*lp.ln2_gain), tape.param(*lp.ln2_bias));
}

Var GraphEncoder::encode_nodes(Tape& tape, Var x, const Mask& mask, const ForwardContext& ctx) const {
  Var h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) h = layer(tape, h, mask, l, ctx);
  return h;
}

Var GraphEncoder::encode(Tape& tape, Var x, const Mask& mask, const ForwardContext& ctx) const {
  return ag::sum(encode_nodes(tape, x, mask, ctx), 0);
}

}  // namespace tcan
