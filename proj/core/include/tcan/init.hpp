#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "tcan/rng.hpp"
#include "tcan/tensor.hpp"

namespace tcan::init {

/// Every parameter draws from its own stream keyed by name, so models that
/// share a parameter name and shape share its initial value.
inline Rng stream_for(std::uint64_t seed, const std::string& param_name) {
  return make_stream(seed, "init." + param_name);
}

inline Tensor xavier_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t(rows, cols);
  for (double& v : t.data()) v = a * (2.0 * uniform01(rng) - 1.0);
  return t;
}

inline Tensor standard_normal(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t(rows, cols);
  for (double& v : t.data()) v = normal01(rng);
  return t;
}

}  // namespace tcan::init
