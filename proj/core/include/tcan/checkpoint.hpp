#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tcan/autograd.hpp"
#include "tcan/tensor.hpp"

namespace tcan {

inline constexpr int kCheckpointVersion = 1;

/// Named tensors plus a free-form JSON object (`meta`, serialized text).
/// On disk: {"format": "tcan-checkpoint", "version": 1, "meta": {...},
/// "tensors": [{"name", "shape", "data"}, ...]}. Doubles are written in
/// shortest round-trip form, so save -> load is bitwise exact.
struct Checkpoint {
  std::string meta = "{}";
  std::vector<std::pair<std::string, Tensor>> tensors;
};

std::string checkpoint_to_string(const Checkpoint& ck);
Checkpoint checkpoint_from_string(const std::string& text);
void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

/// Values of every parameter, in store order.
Checkpoint capture_parameters(const ParameterStore& store, std::string meta = "{}");
/// Copy values into `store`; names and shapes must match exactly.
void apply_parameters(const Checkpoint& ck, ParameterStore& store);

}  // namespace tcan
