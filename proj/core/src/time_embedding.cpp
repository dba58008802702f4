#include "tcan/time_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcan/error.hpp"
#include "tcan/init.hpp"

namespace tcan {

TimeScales TimeScales::from_views(std::span<const CascadeViews> views) {
  TimeScales s;
  double lo = INFINITY, hi = 0.0, t_obs = 0.0;
  for (const auto& v : views) {
    t_obs = std::max(t_obs, v.t_obs);
    const auto& g = v.graph;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.parent[i] < 0) continue;
      const double gap = v.sequence.times[i] - v.sequence.times[static_cast<std::size_t>(g.parent[i])];
      if (gap > 0.0) {
        lo = std::min(lo, gap);
        hi = std::max(hi, gap);
      }
    }
  }
  if (t_obs > 0.0) s.t_obs = t_obs;
  if (hi > 0.0) {
    s.min_gap = lo;
    s.max_gap = std::max(hi, lo);
  } else {
    s.min_gap = s.t_obs / 100.0;
    s.max_gap = s.t_obs;
  }
  return s;
}

TimeEmbedding::TimeEmbedding(ParameterStore& store, std::size_t periodic_dim, bool sqrt_channel)
    : periodic_dim_(periodic_dim), sqrt_channel_(sqrt_channel) {
  if (periodic_dim == 0) throw ValidationError("time embedding needs at least one periodic channel");
  omega_ = &store.add("te.omega", Tensor(1, periodic_dim));
  phase_ = &store.add("te.phase", Tensor(1, periodic_dim));
  w_l_ = &store.add("te.w_l", Tensor(1, 1));
  b_l_ = &store.add("te.b_l", Tensor(1, 1));
  if (sqrt_channel_) w_s_ = &store.add("te.w_s", Tensor(1, 1));
}

void TimeEmbedding::initialize(const TimeScales& scales, std::uint64_t seed) {
  if (!(scales.min_gap > 0.0) || !(scales.max_gap >= scales.min_gap) || !(scales.t_obs > 0.0)) {
    throw ValidationError("time scales must be positive with min_gap <= max_gap");
  }
  Rng rng = init::stream_for(seed, omega_->name);
  const double lo = std::log(2.0 * std::numbers::pi / scales.max_gap);
  const double hi = std::log(2.0 * std::numbers::pi / scales.min_gap);
  for (double& w : omega_->value.data()) w = std::exp(lo + (hi - lo) * uniform01(rng));
  phase_->value.fill(0.0);
  w_l_->value.fill(1.0 / scales.t_obs);
  b_l_->value.fill(0.0);
  if (w_s_) w_s_->value.fill(1.0 / std::sqrt(scales.t_obs));
}

Var TimeEmbedding::embed_sequence(Tape& tape, std::span<const double> times) const {
  if (times.empty()) throw ValidationError("time embedding of an empty sequence");
  const std::size_t n = times.size();
  Tensor t_col(n, 1), sqrt_col(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) {
      throw ValidationError("time embedding needs finite non-negative times");
    }
    t_col[i] = times[i];
    sqrt_col[i] = std::sqrt(times[i]);
  }
  Var t = tape.constant(std::move(t_col));
  Var periodic = ag::cos(ag::add_row(ag::matmul(t, tape.param(*omega_)), tape.param(*phase_)));
  Var linear = ag::add_row(ag::matmul(t, tape.param(*w_l_)), tape.param(*b_l_));
  if (!sqrt_channel_) return ag::concat_cols({periodic, linear});
  Var scaled = ag::matmul(tape.constant(std::move(sqrt_col)), tape.param(*w_s_));
  return ag::concat_cols({periodic, linear, scaled});
}

std::vector<double> TimeEmbedding::embed_time(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time embedding needs a finite non-negative time");
  std::vector<double> out;
  out.reserve(output_dim());
  for (std::size_t k = 0; k < periodic_dim_; ++k) out.push_back(std::cos(omega_->value[k] * t + phase_->value[k]));
  out.push_back(w_l_->value[0] * t + b_l_->value[0]);
  if (sqrt_channel_) out.push_back(w_s_->value[0] * std::sqrt(t));
  return out;
}

Var fuse(Var node_features, Var time_embedding) {
  if (node_features.rows() != time_embedding.rows()) {
    throw ValidationError("fuse row mismatch: " + std::to_string(node_features.rows()) + " vs " +
                          std::to_string(time_embedding.rows()));
  }
  return ag::concat_cols({node_features, time_embedding});
}

}  // namespace tcan
