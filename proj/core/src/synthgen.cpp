#include "tcan/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_set>

namespace tcan {

void GenConfig::validate() const {
  if (n_cascades == 0) throw ValidationError("n_cascades must be positive");
  if (!(branching_mean >= 0.0) || !std::isfinite(branching_mean)) {
    throw ValidationError("branching_mean must be non-negative");
  }
  if (!(decay_rate > 0.0) || !std::isfinite(decay_rate)) throw ValidationError("decay_rate must be positive");
  if (!(powerlaw_alpha > 1.0)) throw ValidationError("powerlaw_alpha must exceed 1");
  if (max_size < 1) throw ValidationError("max_size must be >= 1");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be positive");
  if (min_size < 1 || min_size > max_size) throw ValidationError("min_size must lie in [1, max_size]");
  if (n_users < max_size) throw ValidationError("n_users must be at least max_size");
  if (!(influence_sigma >= 0.0)) throw ValidationError("influence_sigma must be non-negative");
  if (!(publish_span > 0.0)) throw ValidationError("publish_span must be positive");
  if (max_size > 1) {
    const PowerLaw pl(powerlaw_alpha, max_size);
    if (branching_mean > pl.mean_positive()) {
      throw ValidationError("branching_mean exceeds the mean of the positive power-law part (" +
                            std::to_string(pl.mean_positive()) + ")");
    }
  }
}

PowerLaw::PowerLaw(double alpha, std::size_t xmax) {
  if (!(alpha > 1.0)) throw ValidationError("power-law alpha must exceed 1");
  pmf_.resize(xmax + 1);
  double z = 0.0;
  for (std::size_t k = 0; k <= xmax; ++k) {
    pmf_[k] = std::pow(static_cast<double>(k + 1), -alpha);
    z += pmf_[k];
  }
  cdf_.resize(xmax + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k <= xmax; ++k) {
    pmf_[k] /= z;
    acc += pmf_[k];
    cdf_[k] = acc;
  }
  cdf_.back() = 1.0;
}

std::size_t PowerLaw::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), xmax());
}

std::size_t PowerLaw::sample_positive(Rng& rng) const {
  if (xmax() < 1) throw ValidationError("sample_positive needs xmax >= 1");
  // Inverse CDF on the tail above k = 0.
  const double lo = cdf_[0];
  const double u = lo + uniform01(rng) * (1.0 - lo);
  const auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), xmax());
}

double PowerLaw::probability(std::size_t k) const { return k < pmf_.size() ? pmf_[k] : 0.0; }

double PowerLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

double PowerLaw::mean_positive() const {
  const double tail = 1.0 - pmf_[0];
  return tail > 0.0 ? mean() / tail : 0.0;
}

std::size_t sample_powerlaw(double alpha, std::size_t xmax, Rng& rng) {
  if (xmax == 0) return 0;
  return PowerLaw(alpha, xmax).sample(rng);
}

namespace {

struct Pending {
  double time;
  std::size_t seq;  // creation order, breaks time ties deterministically
  std::size_t parent;
  bool operator>(const Pending& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

}  // namespace

namespace {
constexpr std::size_t kMaxAttempts = 1'000'000;
}

std::vector<Cascade> generate(const GenConfig& cfg) {
  cfg.validate();
  const PowerLaw offspring(cfg.powerlaw_alpha, std::max<std::size_t>(cfg.max_size, 1));
  const double q = cfg.max_size > 1 && cfg.branching_mean > 0.0 ? cfg.branching_mean / offspring.mean_positive() : 0.0;

  // Per-user influence, normalized to mean one over the pool.
  std::vector<double> influence(cfg.n_users, 1.0);
  if (cfg.influence_sigma > 0.0) {
    Rng urng = make_stream(cfg.seed, "gen.users");
    double total = 0.0;
    for (auto& w : influence) {
      w = std::exp(cfg.influence_sigma * normal01(urng));
      total += w;
    }
    const double scale = static_cast<double>(cfg.n_users) / total;
    for (auto& w : influence) w *= scale;
  }

  std::vector<Cascade> out;
  out.reserve(cfg.n_cascades);
  auto grow = [&](std::size_t ci, Rng& rng) {
    Cascade c;
    c.id = "c" + std::to_string(ci);
    c.publish_time = std::floor(uniform01(rng) * cfg.publish_span);

    std::unordered_set<std::size_t> used;
    auto draw_user = [&] {
      std::size_t u = uniform_index(rng, cfg.n_users);
      while (!used.insert(u).second) u = uniform_index(rng, cfg.n_users);
      return u;
    };
    std::vector<std::size_t> users;
    std::vector<double> times;

    users.push_back(draw_user());
    times.push_back(0.0);
    c.root = "u" + std::to_string(users[0]);
    c.records.push_back({"", c.root, 0.0});

    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::size_t seq = 0;
    auto spawn = [&](std::size_t node) {
      const double p = std::min(1.0, q * influence[users[node]]);
      if (uniform01(rng) >= p) return;
      const std::size_t k = offspring.sample_positive(rng);
      for (std::size_t j = 0; j < k; ++j) {
        const double gap = -std::log1p(-uniform01(rng)) / cfg.decay_rate;
        const double t = times[node] + gap;
        if (t <= cfg.t_end) queue.push({t, seq++, node});
      }
    };
    spawn(0);
    while (!queue.empty() && users.size() < cfg.max_size) {
      const Pending next = queue.top();
      queue.pop();
      const std::size_t node = users.size();
      users.push_back(draw_user());
      times.push_back(next.time);
      c.records.push_back({"u" + std::to_string(users[next.parent]), "u" + std::to_string(users[node]), next.time});
      spawn(node);
    }
    // Pop order is by time; re-sort for the (time, child id) tie rule.
    std::stable_sort(c.records.begin() + 1, c.records.end(), [](const CascadeRecord& a, const CascadeRecord& b) {
      return a.join_time != b.join_time ? a.join_time < b.join_time : a.child < b.child;
    });
    return c;
  };
  for (std::size_t ci = 0; ci < cfg.n_cascades; ++ci) {
    Rng rng = make_stream(cfg.seed, "gen", ci);
    Cascade c = grow(ci, rng);
    for (std::size_t attempt = 1; c.size() < cfg.min_size; ++attempt) {
      if (attempt > kMaxAttempts) {
        throw ValidationError("no cascade of size >= " + std::to_string(cfg.min_size) + " after " +
                              std::to_string(kMaxAttempts) + " draws");
      }
      c = grow(ci, rng);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tcan
