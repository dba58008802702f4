#pragma once

#include <cstdint>
#include <span>

#include "tcan/autograd.hpp"

namespace tcan {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled: theta <- theta - lr * weight_decay * theta before the Adam delta.
  double weight_decay = 5e-4;

  void validate() const;
};

/// One bias-corrected Adam update at step `t` (1-based), then zero grads.
void adam_step(std::span<Parameter* const> params, const AdamHyper& hyper, std::int64_t t);

}  // namespace tcan
