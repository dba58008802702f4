#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tcan/autograd.hpp"
#include "tcan/cascade.hpp"

namespace tcan {

/// Time ranges that drive the time-embedding initialization.
struct TimeScales {
  double min_gap = 1.0;
  double max_gap = 100.0;
  double t_obs = 100.0;

  /// Smallest/largest positive repost gap (child minus parent join time) and
  /// the largest t_obs over `views`. Falls back to defaults when empty.
  static TimeScales from_views(std::span<const CascadeViews> views);
};

/// Learnable map t -> [cos(omega * t + phase) (periodic_dim), w_l * t + b_l,
/// w_s * sqrt(t)]. The sqrt channel is optional (PL ablation).
///
/// Parameters are registered as `te.omega`, `te.phase` (1 x periodic_dim),
/// `te.w_l`, `te.b_l`, `te.w_s` (1 x 1).
class TimeEmbedding {
 public:
  TimeEmbedding(ParameterStore& store, std::size_t periodic_dim, bool sqrt_channel);

  /// omega log-uniform over [2pi/max_gap, 2pi/min_gap], phase 0,
  /// w_l = 1/t_obs, b_l = 0, w_s = 1/sqrt(t_obs).
  void initialize(const TimeScales& scales, std::uint64_t seed);

  std::size_t periodic_dim() const { return periodic_dim_; }
  std::size_t output_dim() const { return periodic_dim_ + (sqrt_channel_ ? 2 : 1); }

  /// n x output_dim; row j embeds times[j]. Throws on n == 0 or negative t.
  Var embed_sequence(Tape& tape, std::span<const double> times) const;
  /// Untracked single-time evaluation.
  std::vector<double> embed_time(double t) const;

  Parameter& omega() const { return *omega_; }
  Parameter& phase() const { return *phase_; }
  Parameter& w_l() const { return *w_l_; }
  Parameter& b_l() const { return *b_l_; }
  Parameter* w_s() const { return w_s_; }

 private:
  std::size_t periodic_dim_;
  bool sqrt_channel_;
  Parameter* omega_;
  Parameter* phase_;
  Parameter* w_l_;
  Parameter* b_l_;
  Parameter* w_s_ = nullptr;
};

/// [X | H_t]: node features first, then time channels.
Var fuse(Var node_features, Var time_embedding);

}  // namespace tcan
