#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tcan/autograd.hpp"
#include "tcan/cascade.hpp"
#include "tcan/rng.hpp"
#include "tcan/tensor.hpp"

namespace tcan::testing {

inline Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(r, c);
  for (double& v : t.data()) v = lo + (hi - lo) * uniform01(rng);
  return t;
}

inline double rel_err(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

/// Independent central-difference check of every coordinate of `params`.
/// Returns the worst relative error.
inline double fd_check(const std::function<Var(Tape&)>& f, const std::vector<Parameter*>& params,
                       double eps = 1e-6) {
  for (auto* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(f(tape));
  }
  double worst = 0.0;
  for (auto* p : params) {
    const Tensor analytic = p->grad;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double x0 = p->value[i];
      p->value[i] = x0 + eps;
      double up, down;
      {
        Tape t;
        up = f(t).value()[0];
      }
      p->value[i] = x0 - eps;
      {
        Tape t;
        down = f(t).value()[0];
      }
      p->value[i] = x0;
      worst = std::max(worst, rel_err(analytic[i], (up - down) / (2.0 * eps)));
    }
    p->zero_grad();
  }
  return worst;
}

/// Weighted sum of all entries with fixed pseudo-random weights, so every
/// output coordinate reaches the loss with a distinct coefficient.
inline Var probe_loss(Tape& tape, Var out, std::uint64_t seed = 99) {
  Rng rng(seed);
  return ag::sum_all(ag::mul(out, tape.constant(random_tensor(out.rows(), out.cols(), rng))));
}

/// Cascade from (parent, child, time) triples; the first triple is the root
/// with an empty parent.
inline Cascade make_cascade(const std::string& id, std::vector<CascadeRecord> recs) {
  Cascade c;
  c.id = id;
  c.root = recs.front().child;
  c.records = std::move(recs);
  return c;
}

/// Root A with leaves B, C, D, E joining at 10, 20, 30, 40.
inline Cascade star_cascade() {
  return make_cascade("star", {{"", "A", 0}, {"A", "B", 10}, {"A", "C", 20}, {"A", "D", 30}, {"A", "E", 40}});
}

/// A -> B -> C -> ... chain, node k joining at time k.
inline Cascade chain_cascade(std::size_t n, const std::string& id = "chain") {
  std::vector<CascadeRecord> recs{{"", "n0", 0}};
  for (std::size_t k = 1; k < n; ++k) recs.push_back({"n" + std::to_string(k - 1), "n" + std::to_string(k), double(k)});
  return make_cascade(id, std::move(recs));
}

}  // namespace tcan::testing
