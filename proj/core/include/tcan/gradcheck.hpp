#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tcan/autograd.hpp"

namespace tcan {

/// Builds a scalar loss on the given tape. Must be deterministic.
using LossFn = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double eps = 1e-5;
  /// Coordinates checked per parameter; 0 checks all of them. Sampled
  /// coordinates are chosen deterministically from `seed`.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::string name;
  std::size_t coords_checked = 0;
  double max_rel_error = 0.0;
  double max_abs_grad = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<GradCheckEntry> per_param;
};

/// |a - n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

/// Compare tape gradients against central differences. Parameter values are
/// restored bit-exactly; gradients of `params` are left zeroed.
GradCheckReport grad_check(const LossFn& f, std::span<Parameter* const> params, const GradCheckOptions& opts);
double grad_check(const LossFn& f, std::span<Parameter* const> params, double eps = 1e-5);

}  // namespace tcan
