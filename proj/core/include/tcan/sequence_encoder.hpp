#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcan/autograd.hpp"
#include "tcan/graph_encoder.hpp"

namespace tcan {

/// One LSTM direction: input gate j, forget gate f, output gate o and
/// candidate c, each with input (input_dim x hidden), recurrent
/// (hidden x hidden) and bias (1 x hidden) weights.
struct LSTMParams {
  Parameter* w_xj = nullptr;
  Parameter* w_xf = nullptr;
  Parameter* w_xo = nullptr;
  Parameter* w_xc = nullptr;
  Parameter* w_hj = nullptr;
  Parameter* w_hf = nullptr;
  Parameter* w_ho = nullptr;
  Parameter* w_hc = nullptr;
  Parameter* b_j = nullptr;
  Parameter* b_f = nullptr;
  Parameter* b_o = nullptr;
  Parameter* b_c = nullptr;
  std::size_t input_dim = 0;
  std::size_t hidden = 0;

  static LSTMParams create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                           std::size_t hidden);
  void initialize(std::uint64_t seed);
};

struct LSTMStep {
  Var h;
  Var c;
  Var input_gate;
  Var forget_gate;
  Var output_gate;
  Var candidate;
};

/// c = f * c_prev + j * tanh(.), h = o * tanh(c); all 1 x hidden.
LSTMStep lstm_cell(Tape& tape, Var x, Var h_prev, Var c_prev, const LSTMParams& p);

/// Runs one direction over the rows of x (n x input_dim). Row t of the
/// result is the hidden state after consuming position t, so with
/// `reverse` the last state of the pass sits in row 0.
Var run_lstm(Tape& tape, Var x, const LSTMParams& p, bool reverse);

struct BiLSTMOutput {
  Var states;  ///< n x d_h, last layer, [forward | backward] per row
  Var last;    ///< 1 x d_h, [forward last state | backward last state]
};

/// Self-attention pooling weights (csat.ap.w_q / w_k / w_v, d_h x d_h).
struct APParams {
  Parameter* w_q = nullptr;
  Parameter* w_k = nullptr;
  Parameter* w_v = nullptr;
};

/// Stacked Bi-LSTM over the time-ordered sequence followed by attention
/// pooling. Per-direction hidden size is d_h / 2.
class SequenceEncoder {
 public:
  SequenceEncoder(ParameterStore& store, std::size_t input_dim, std::size_t d_h, std::size_t layers,
                  bool attn_pool);

  void initialize(std::uint64_t seed);

  std::size_t d_h() const { return d_h_; }
  std::size_t num_layers() const { return fwd_.size(); }
  const LSTMParams& forward_params(std::size_t l) const { return fwd_.at(l); }
  const LSTMParams& backward_params(std::size_t l) const { return bwd_.at(l); }
  bool has_attn_pool() const { return ap_.w_q != nullptr; }

  BiLSTMOutput bilstm_stack(Tape& tape, Var x) const;
  /// Unmasked single-head self-attention over the rows, then column sum.
  /// `weights` receives the n x n attention matrix when non-null.
  Var attn_pool(Tape& tape, Var states, Tensor* weights = nullptr) const;
  /// attn_pool(states) when pooling is enabled, else the last hidden states.
  Var encode(Tape& tape, Var x) const;

 private:
  std::size_t d_h_;
  std::vector<LSTMParams> fwd_;
  std::vector<LSTMParams> bwd_;
  APParams ap_;
};

}  // namespace tcan
