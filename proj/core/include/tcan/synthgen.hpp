#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tcan/cascade.hpp"
#include "tcan/rng.hpp"

namespace tcan {

/// Parameters of the branching-process cascade generator.
///
/// Each node is "active" with probability q * influence(user) and, if
/// active, draws its offspring count from the power law restricted to
/// k >= 1. q is chosen so that the mean offspring count equals
/// `branching_mean` for an average-influence user. Children join after an
/// exponential delay with rate `decay_rate`. Growth stops at `max_size`
/// nodes or at the horizon `t_end`, whichever comes first.
struct GenConfig {
  std::size_t n_cascades = 1000;
  double branching_mean = 0.9;
  double decay_rate = 1.0;
  double powerlaw_alpha = 2.5;
  std::size_t max_size = 500;
  double t_end = 10.0;
  std::uint64_t seed = 1;

  /// Size of the user pool node ids are drawn from.
  std::size_t n_users = 5000;
  /// Log-normal sigma of per-user influence; 0 makes all users identical.
  double influence_sigma = 0.0;
  /// Cascades smaller than this are redrawn (from the same stream) until
  /// they reach it.
  std::size_t min_size = 1;
  /// Publish times are spread uniformly over [0, publish_span).
  double publish_span = 86400.0;

  void validate() const;
};

/// Cumulative table for P(k) proportional to (k+1)^-alpha on {0..xmax}.
class PowerLaw {
 public:
  PowerLaw(double alpha, std::size_t xmax);

  std::size_t sample(Rng& rng) const;
  /// Draw conditioned on k >= 1; requires xmax >= 1.
  std::size_t sample_positive(Rng& rng) const;
  double probability(std::size_t k) const;
  double mean() const;
  double mean_positive() const;
  std::size_t xmax() const { return cdf_.size() - 1; }

 private:
  std::vector<double> cdf_;
  std::vector<double> pmf_;
};

/// One draw from P(k) proportional to (k+1)^-alpha on {0..xmax}.
std::size_t sample_powerlaw(double alpha, std::size_t xmax, Rng& rng);

std::vector<Cascade> generate(const GenConfig& cfg);

}  // namespace tcan
