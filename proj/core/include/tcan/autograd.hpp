#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcan/rng.hpp"
#include "tcan/tensor.hpp"

namespace tcan {

/// Learnable tensor with its gradient accumulator and Adam moments. All four
/// tensors always share one shape.
struct Parameter {
  Parameter(std::string name, Tensor init);

  std::string name;
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;

  void zero_grad() { grad.fill(0.0); }
};

/// Owns parameters with stable addresses, in registration order.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;
  ParameterStore(ParameterStore&&) = default;
  ParameterStore& operator=(ParameterStore&&) = default;

  Parameter& add(std::string name, Tensor init);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  /// Parameters whose names start with `prefix`.
  std::vector<Parameter*> with_prefix(const std::string& prefix);

  std::size_t size() const { return params_.size(); }
  std::size_t num_scalars() const;
  void zero_grad();

  /// Copies of every value tensor, in registration order.
  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, Parameter*> by_name_;
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while its
/// tape is alive and not cleared.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Dynamic reverse-mode tape. Nodes are appended in evaluation order, so
/// reverse insertion order is a valid topological order for backward.
/// Parameter leaves alias the Parameter's storage: their gradients land
/// directly in Parameter::grad.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var param(Parameter& p);

  /// Record an op result. Throws NumericalError naming `op` if `value` holds
  /// NaN/Inf. `inputs` decide whether the node needs a gradient.
  Var record(const char* op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(const char* op, Tensor value, const std::vector<Var>& inputs, BackwardFn backward);

  const Tensor& value(std::size_t id) const;
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  /// Gradient accumulator of node `id`, allocated zeroed on first access.
  Tensor& grad(std::size_t id);

  /// Seed d(loss)/d(loss) = 1 and propagate; gradients accumulate (+=) into
  /// every reachable Parameter. The tape is cleared afterwards.
  void backward(Var loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    BackwardFn backward;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
};

/// Row-major n x n boolean mask; nonzero means "may attend".
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  static Mask full(std::size_t r, std::size_t c) { return {r, c, std::vector<std::uint8_t>(r * c, 1)}; }
  bool at(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
};

namespace ag {

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
/// a (r x c) + row (1 x c) broadcast over rows.
Var add_row(Var a, Var row);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);

Var sigmoid(Var a);
Var tanh(Var a);
/// x / sqrt(1 + x^2): saturating like tanh, with polynomial tails.
Var isru(Var a);
Var cos(Var a);
/// Requires every entry >= 0.
Var sqrt_pos(Var a);
/// x * Phi(x) with the exact normal CDF.
Var gelu(Var a);

/// axis 0 sums over rows (-> 1 x c), axis 1 over columns (-> r x 1).
Var sum(Var a, int axis);
Var sum_all(Var a);
Var mean_all(Var a);

Var concat(const std::vector<Var>& parts, int axis);
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, std::size_t start, std::size_t count);
Var gather_rows(Var a, std::span<const std::size_t> rows);

/// Row-wise softmax restricted to mask; masked entries are exactly 0.
Var masked_softmax(Var logits, const Mask& mask);
Var softmax(Var logits);

/// Row-wise layer normalization with learnable 1 x c gain and bias.
Var layernorm(Var x, Var gain, Var bias, double eps = 1e-5);

/// Inverted dropout: scales kept entries by 1/(1-p) when training, identity
/// otherwise.
Var dropout(Var x, double p, bool training, Rng& rng);

}  // namespace ag

}  // namespace tcan
