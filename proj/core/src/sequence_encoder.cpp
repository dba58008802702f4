#include "tcan/sequence_encoder.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "tcan/error.hpp"
#include "tcan/init.hpp"

namespace tcan {

LSTMParams LSTMParams::create(ParameterStore& store, const std::string& prefix, std::size_t input_dim,
                              std::size_t hidden) {
  LSTMParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.w_xj = &store.add(prefix + "w_xj", Tensor(input_dim, hidden));
  p.w_xf = &store.add(prefix + "w_xf", Tensor(input_dim, hidden));
  p.w_xo = &store.add(prefix + "w_xo", Tensor(input_dim, hidden));
  p.w_xc = &store.add(prefix + "w_xc", Tensor(input_dim, hidden));
  p.w_hj = &store.add(prefix + "w_hj", Tensor(hidden, hidden));
  p.w_hf = &store.add(prefix + "w_hf", Tensor(hidden, hidden));
  p.w_ho = &store.add(prefix + "w_ho", Tensor(hidden, hidden));
  p.w_hc = &store.add(prefix + "w_hc", Tensor(hidden, hidden));
  p.b_j = &store.add(prefix + "b_j", Tensor(1, hidden));
  p.b_f = &store.add(prefix + "b_f", Tensor(1, hidden));
  p.b_o = &store.add(prefix + "b_o", Tensor(1, hidden));
  p.b_c = &store.add(prefix + "b_c", Tensor(1, hidden));
  return p;
}

void LSTMParams::initialize(std::uint64_t seed) {
  for (Parameter* w : {w_xj, w_xf, w_xo, w_xc, w_hj, w_hf, w_ho, w_hc}) {
    Rng rng = init::stream_for(seed, w->name);
    w->value = init::xavier_uniform(w->value.rows(), w->value.cols(), rng);
  }
  b_j->value.fill(0.0);
  b_f->value.fill(1.0);
  b_o->value.fill(0.0);
  b_c->value.fill(0.0);
}

namespace {

struct Packed {
  Var w_x;  // input_dim x 4H, gate order j f o c
  Var w_h;  // H x 4H
  Var b;    // 1 x 4H
};

Packed pack(Tape& tape, const LSTMParams& p) {
  return {ag::concat_cols({tape.param(*p.w_xj), tape.param(*p.w_xf), tape.param(*p.w_xo), tape.param(*p.w_xc)}),
          ag::concat_cols({tape.param(*p.w_hj), tape.param(*p.w_hf), tape.param(*p.w_ho), tape.param(*p.w_hc)}),
          ag::concat_cols({tape.param(*p.b_j), tape.param(*p.b_f), tape.param(*p.b_o), tape.param(*p.b_c)})};
}

// `pre_x` is x W_x + b for this step (1 x 4H).
LSTMStep step(Var pre_x, Var h_prev, Var c_prev, Var w_h, std::size_t hidden) {
  Var pre = ag::add(pre_x, ag::matmul(h_prev, w_h));
  LSTMStep s;
  s.input_gate = ag::sigmoid(ag::slice_cols(pre, 0, hidden));
  s.forget_gate = ag::sigmoid(ag::slice_cols(pre, hidden, hidden));
  s.output_gate = ag::sigmoid(ag::slice_cols(pre, 2 * hidden, hidden));
  s.candidate = ag::tanh(ag::slice_cols(pre, 3 * hidden, hidden));
  s.c = ag::add(ag::mul(s.forget_gate, c_prev), ag::mul(s.input_gate, s.candidate));
  s.h = ag::mul(s.output_gate, ag::tanh(s.c));
  return s;
}

}  // namespace

LSTMStep lstm_cell(Tape& tape, Var x, Var h_prev, Var c_prev, const LSTMParams& p) {
  if (x.rows() != 1 || x.cols() != p.input_dim) throw ValidationError("lstm_cell input shape mismatch");
  if (h_prev.rows() != 1 || h_prev.cols() != p.hidden || c_prev.rows() != 1 || c_prev.cols() != p.hidden) {
    throw ValidationError("lstm_cell state shape mismatch");
  }
  const Packed w = pack(tape, p);
  return step(ag::add_row(ag::matmul(x, w.w_x), w.b), h_prev, c_prev, w.w_h, p.hidden);
}

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Whole-direction recurrence as one tape node: pre (n x 4H) holds x W_x + b,
// the result row t is h after consuming position t.
Var lstm_scan(Tape& tape, Var pre, Var w_h, std::size_t hidden, bool reverse) {
  const std::size_t n = pre.rows();
  const std::size_t four = 4 * hidden;
  struct Cache {
    std::vector<double> gates;  // per step k: j f o g
    std::vector<double> cells;  // per step k
  };
  auto cache = std::make_shared<Cache>();
  cache->gates.resize(n * four);
  cache->cells.resize(n * hidden);
  const Tensor& pv = pre.value();
  const Tensor& wv = w_h.value();
  Tensor out(n, hidden);
  std::vector<double> z(four);
  const double* h_prev = nullptr;
  const double* c_prev = nullptr;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? n - 1 - k : k;
    std::copy_n(pv.data().data() + t * four, four, z.begin());
    if (h_prev) kernels::gemm_nn({h_prev, hidden}, wv.data(), z, 1, hidden, four);
    double* g = cache->gates.data() + k * four;
    double* c = cache->cells.data() + k * hidden;
    double* h = out.data().data() + t * hidden;
    for (std::size_t u = 0; u < hidden; ++u) {
      const double j = sigmoid(z[u]);
      const double f = sigmoid(z[hidden + u]);
      const double o = sigmoid(z[2 * hidden + u]);
      const double cand = std::tanh(z[3 * hidden + u]);
      g[u] = j;
      g[hidden + u] = f;
      g[2 * hidden + u] = o;
      g[3 * hidden + u] = cand;
      c[u] = (c_prev ? f * c_prev[u] : 0.0) + j * cand;
      h[u] = o * std::tanh(c[u]);
    }
    h_prev = h;
    c_prev = c;
  }
  const std::size_t ip = pre.id(), iw = w_h.id();
  return tape.record("lstm_scan", std::move(out), {pre, w_h}, [=](Tape& t, std::size_t self) {
    const Tensor& gout = t.grad(self);
    const Tensor& hs = t.value(self);
    const Tensor& wv = t.value(iw);
    Tensor dpre(n, four);
    std::vector<double> dh(hidden, 0.0), dc(hidden, 0.0);
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t t_pos = reverse ? n - 1 - k : k;
      const double* g = cache->gates.data() + k * four;
      const double* c = cache->cells.data() + k * hidden;
      const double* c_prev = k > 0 ? cache->cells.data() + (k - 1) * hidden : nullptr;
      double* d = dpre.data().data() + t_pos * four;
      for (std::size_t u = 0; u < hidden; ++u) {
        const double j = g[u], f = g[hidden + u], o = g[2 * hidden + u], cand = g[3 * hidden + u];
        const double dhu = dh[u] + gout(t_pos, u);
        const double tc = std::tanh(c[u]);
        const double dct = dc[u] + dhu * o * (1.0 - tc * tc);
        d[u] = dct * cand * j * (1.0 - j);
        d[hidden + u] = (c_prev ? dct * c_prev[u] : 0.0) * f * (1.0 - f);
        d[2 * hidden + u] = dhu * tc * o * (1.0 - o);
        d[3 * hidden + u] = dct * j * (1.0 - cand * cand);
        dc[u] = dct * f;
      }
      std::fill(dh.begin(), dh.end(), 0.0);
      if (k > 0) kernels::gemm_nt({d, four}, wv.data(), dh, 1, four, hidden);
    }
    if (t.needs_grad(ip)) {
      Tensor& gp = t.grad(ip);
      for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += dpre[i];
    }
    if (t.needs_grad(iw) && n > 1) {
      // Step k consumed h_{k-1}; gather those rows against the matching dpre rows.
      Tensor h_prev(n - 1, hidden), d_next(n - 1, four);
      for (std::size_t k = 1; k < n; ++k) {
        const std::size_t tp = reverse ? n - k : k - 1;
        const std::size_t tc = reverse ? n - 1 - k : k;
        std::copy_n(hs.data().data() + tp * hidden, hidden, h_prev.data().data() + (k - 1) * hidden);
        std::copy_n(dpre.data().data() + tc * four, four, d_next.data().data() + (k - 1) * four);
      }
      kernels::gemm_tn(h_prev.data(), d_next.data(), t.grad(iw).data(), hidden, n - 1, four);
    }
  });
}

}  // namespace

Var run_lstm(Tape& tape, Var x, const LSTMParams& p, bool reverse) {
  const std::size_t n = x.rows();
  if (n == 0) throw ValidationError("LSTM over an empty sequence");
  if (x.cols() != p.input_dim) {
    throw ValidationError("LSTM input width " + std::to_string(x.cols()) + ", expected " +
                          std::to_string(p.input_dim));
  }
  const Packed w = pack(tape, p);
  return lstm_scan(tape, ag::add_row(ag::matmul(x, w.w_x), w.b), w.w_h, p.hidden, reverse);
}

SequenceEncoder::SequenceEncoder(ParameterStore& store, std::size_t input_dim, std::size_t d_h, std::size_t layers,
                                 bool attn_pool)
    : d_h_(d_h) {
  if (d_h == 0 || d_h % 2 != 0) throw ValidationError("d_h must be positive and even");
  if (layers == 0) throw ValidationError("CSAT needs at least one Bi-LSTM layer");
  const std::size_t hidden = d_h / 2;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string p = "csat.layer" + std::to_string(l) + ".";
    const std::size_t in = l == 0 ? input_dim : d_h;
    fwd_.push_back(LSTMParams::create(store, p + "fwd.", in, hidden));
    bwd_.push_back(LSTMParams::create(store, p + "bwd.", in, hidden));
  }
  if (attn_pool) {
    ap_.w_q = &store.add("csat.ap.w_q", Tensor(d_h, d_h));
    ap_.w_k = &store.add("csat.ap.w_k", Tensor(d_h, d_h));
    ap_.w_v = &store.add("csat.ap.w_v", Tensor(d_h, d_h));
  }
}

void SequenceEncoder::initialize(std::uint64_t seed) {
  for (auto& p : fwd_) p.initialize(seed);
  for (auto& p : bwd_) p.initialize(seed);
  if (has_attn_pool()) {
    for (Parameter* w : {ap_.w_q, ap_.w_k, ap_.w_v}) {
      Rng rng = init::stream_for(seed, w->name);
      w->value = init::xavier_uniform(d_h_, d_h_, rng);
    }
  }
}

BiLSTMOutput SequenceEncoder::bilstm_stack(Tape& tape, Var x) const {
  Var in = x;
  Var fwd, bwd;
  for (std::size_t l = 0; l < fwd_.size(); ++l) {
    fwd = run_lstm(tape, in, fwd_[l], false);
    bwd = run_lstm(tape, in, bwd_[l], true);
    in = ag::concat_cols({fwd, bwd});
  }
  const std::size_t n = x.rows();
  const std::size_t last_row[1] = {n - 1};
  const std::size_t first_row[1] = {0};
  BiLSTMOutput out;
  out.states = in;
  out.last = ag::concat_cols({ag::gather_rows(fwd, last_row), ag::gather_rows(bwd, first_row)});
  return out;
}

Var SequenceEncoder::attn_pool(Tape& tape, Var states, Tensor* weights) const {
  if (!has_attn_pool()) throw ValidationError("attention pooling is disabled for this encoder");
  if (states.cols() != d_h_) throw ValidationError("attn_pool input width mismatch");
  Var q = ag::matmul(states, tape.param(*ap_.w_q));
  Var k = ag::matmul(states, tape.param(*ap_.w_k));
  Var v = ag::matmul(states, tape.param(*ap_.w_v));
  Var logits = ag::scale(ag::matmul(q, ag::transpose(k)), 1.0 / std::sqrt(static_cast<double>(d_h_)));
  Var alpha = ag::softmax(logits);
  if (weights) *weights = alpha.value();
  return ag::sum(ag::matmul(alpha, v), 0);
}

Var SequenceEncoder::encode(Tape& tape, Var x) const {
  BiLSTMOutput out = bilstm_stack(tape, x);
  return has_attn_pool() ? attn_pool(tape, out.states) : out.last;
}

}  // namespace tcan
