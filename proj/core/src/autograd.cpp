#include "tcan/autograd.hpp"

#include <algorithm>
#include <cmath>

#include "tcan/error.hpp"

namespace tcan {

Parameter::Parameter(std::string n, Tensor init)
    : name(std::move(n)),
      value(std::move(init)),
      grad(value.shape(), 0.0),
      adam_m(value.shape(), 0.0),
      adam_v(value.shape(), 0.0) {}

Parameter& ParameterStore::add(std::string name, Tensor init) {
  if (by_name_.contains(name)) throw ValidationError("duplicate parameter '" + name + "'");
  params_.push_back(std::make_unique<Parameter>(name, std::move(init)));
  Parameter* p = params_.back().get();
  by_name_.emplace(std::move(name), p);
  return *p;
}

Parameter& ParameterStore::get(const std::string& name) {
  auto* p = find(name);
  if (!p) throw ValidationError("unknown parameter '" + name + "'");
  return *p;
}

const Parameter& ParameterStore::get(const std::string& name) const {
  const auto* p = find(name);
  if (!p) throw ValidationError("unknown parameter '" + name + "'");
  return *p;
}

Parameter* ParameterStore::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<Parameter*> ParameterStore::with_prefix(const std::string& prefix) {
  std::vector<Parameter*> out;
  for (auto& p : params_) {
    if (p->name.starts_with(prefix)) out.push_back(p.get());
  }
  return out;
}

std::size_t ParameterStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::vector<Tensor> ParameterStore::snapshot() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterStore::restore(const std::vector<Tensor>& values) {
  if (values.size() != params_.size()) throw ValidationError("snapshot size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].same_shape(params_[i]->value)) throw ValidationError("snapshot shape mismatch");
    params_[i]->value = values[i];
  }
}

const Tensor& Var::value() const {
  if (!tape_) throw ValidationError("use of an empty Var");
  return tape_->value(id_);
}

Var Tape::constant(Tensor value) {
  if (!value.all_finite()) throw NumericalError("constant holds non-finite values");
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(Parameter& p) {
  Node n;
  n.param = &p;
  n.needs_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(const char* op, Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(backward));
}

Var Tape::record(const char* op, Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  if (!value.all_finite()) throw NumericalError(std::string("op '") + op + "' produced non-finite values");
  Node n;
  n.value = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape() != this) throw ValidationError(std::string("op '") + op + "' mixes tapes");
    n.needs_grad = n.needs_grad || nodes_[v.id()].needs_grad;
  }
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.param ? n.param->value : n.value;
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.param) return n.param->grad;
  if (n.grad.empty() && !n.value.empty()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ValidationError("backward on a Var from another tape");
  if (value(loss.id()).size() != 1) {
    throw ValidationError("backward needs a scalar loss, got shape " + value(loss.id()).shape_str());
  }
  grad(loss.id())[0] += 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, i);
  }
  for (auto& n : nodes_) {
    if (n.param && !n.param->grad.all_finite()) {
      throw NumericalError("non-finite gradient for parameter '" + n.param->name + "'");
    }
  }
  clear();
}

void Tape::clear() { nodes_.clear(); }

namespace ag {

namespace {

Tape& tape_of(Var a) {
  if (!a.valid()) throw ValidationError("op on an empty Var");
  return *a.tape();
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ValidationError(std::string(op) + " shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
  }
}

template <typename F, typename DF>
Var unary(const char* op, Var a, F f, DF df) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  const std::size_t ia = a.id();
  return t.record(op, std::move(y), {a}, [ia, df](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(ia);
    const Tensor& y = t.value(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(x[i], y[i]);
  });
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.rows()) {
    throw ValidationError("matmul shape mismatch: " + A.shape_str() + " * " + B.shape_str());
  }
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("matmul", tcan::matmul(A, B), {a, b}, [=](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) kernels::gemm_nt(g.data(), t.value(ib).data(), t.grad(ia).data(), m, n, k);
    if (t.needs_grad(ib)) kernels::gemm_tn(t.value(ia).data(), g.data(), t.grad(ib).data(), k, m, n);
  });
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  Tensor y(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) y(j, i) = x(i, j);
  const std::size_t ia = a.id();
  return t.record("transpose", std::move(y), {a}, [=](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gx(i, j) += g(j, i);
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape("add", a.value(), b.value());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("add", std::move(y), {a, b}, [=](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    for (std::size_t id : {ia, ib}) {
      if (!t.needs_grad(id)) continue;
      Tensor& gx = t.grad(id);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
  });
}

Var add_row(Var a, Var row) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  const Tensor& r = row.value();
  if (r.rows() != 1 || r.cols() != x.cols()) {
    throw ValidationError("add_row shape mismatch: " + x.shape_str() + " + " + r.shape_str());
  }
  const std::size_t n = x.rows(), c = x.cols();
  Tensor y = x;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) y(i, j) += r[j];
  const std::size_t ia = a.id(), ir = row.id();
  return t.record("add_row", std::move(y), {a, row}, [=](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) {
      Tensor& gx = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
    if (t.needs_grad(ir)) {
      Tensor& gr = t.grad(ir);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j) gr[j] += g(i, j);
    }
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape("sub", a.value(), b.value());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("sub", std::move(y), {a, b}, [=](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) {
      Tensor& gx = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
    if (t.needs_grad(ib)) {
      Tensor& gx = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape("mul", a.value(), b.value());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("mul", std::move(y), {a, b}, [=](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(ia)) {
      const Tensor& bv = t.value(ib);
      Tensor& gx = t.grad(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * bv[i];
    }
    if (t.needs_grad(ib)) {
      const Tensor& av = t.value(ia);
      Tensor& gx = t.grad(ib);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * av[i];
    }
  });
}

Var scale(Var a, double s) {
  return unary(
      "scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var sigmoid(Var a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var isru(Var a) {
  return unary(
      "isru", a, [](double x) { return x / std::sqrt(1.0 + x * x); },
      [](double x, double) {
        const double r = 1.0 / std::sqrt(1.0 + x * x);
        return r * r * r;
      });
}

Var cos(Var a) {
  return unary(
      "cos", a, [](double x) { return std::cos(x); }, [](double x, double) { return -std::sin(x); });
}

Var sqrt_pos(Var a) {
  for (double v : a.value().data()) {
    if (v < 0.0) throw ValidationError("sqrt_pos on negative input");
  }
  return unary(
      "sqrt_pos", a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Var gelu(Var a) {
  return unary(
      "gelu", a, [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
      [](double x, double) {
        return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
      });
}

Var sum(Var a, int axis) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  if (axis != 0 && axis != 1) throw ValidationError("sum axis must be 0 or 1");
  Tensor y = axis == 0 ? Tensor(1, c) : Tensor(r, 1);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) y[axis == 0 ? j : i] += x(i, j);
  const std::size_t ia = a.id();
  return t.record("sum", std::move(y), {a}, [=](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gx(i, j) += g[axis == 0 ? j : i];
  });
}

Var sum_all(Var a) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  double s = 0.0;
  for (double v : x.data()) s += v;
  const std::size_t ia = a.id();
  return t.record("sum_all", Tensor::scalar(s), {a}, [=](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const double g = t.grad(self)[0];
    for (double& v : t.grad(ia).data()) v += g;
  });
}

Var mean_all(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ValidationError("mean of an empty tensor");
  return scale(sum_all(a), 1.0 / n);
}

Var concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw ValidationError("concat of nothing");
  if (axis != 0 && axis != 1) throw ValidationError("concat axis must be 0 or 1");
  Tape& t = tape_of(parts.front());
  std::vector<std::size_t> ids;
  std::vector<std::size_t> widths;
  const std::size_t fixed = axis == 1 ? parts.front().rows() : parts.front().cols();
  std::size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    const std::size_t other = axis == 1 ? v.rows() : v.cols();
    if (other != fixed) throw ValidationError("concat shape mismatch at " + v.shape_str());
    widths.push_back(axis == 1 ? v.cols() : v.rows());
    total += widths.back();
    ids.push_back(p.id());
  }
  Tensor y = axis == 1 ? Tensor(fixed, total) : Tensor(total, fixed);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    if (axis == 1) {
      for (std::size_t i = 0; i < fixed; ++i)
        for (std::size_t j = 0; j < widths[k]; ++j) y(i, off + j) = v(i, j);
    } else {
      std::copy(v.data().begin(), v.data().end(), y.data().begin() + static_cast<std::ptrdiff_t>(off * fixed));
    }
    off += widths[k];
  }
  return t.record("concat", std::move(y), parts, [=](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.needs_grad(ids[k])) {
        Tensor& gx = t.grad(ids[k]);
        if (axis == 1) {
          for (std::size_t i = 0; i < fixed; ++i)
            for (std::size_t j = 0; j < widths[k]; ++j) gx(i, j) += g(i, off + j);
        } else {
          const std::size_t base = off * fixed;
          for (std::size_t i = 0; i < widths[k] * fixed; ++i) gx[i] += g[base + i];
        }
      }
      off += widths[k];
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) { return concat(parts, 1); }
Var concat_rows(const std::vector<Var>& parts) { return concat(parts, 0); }

Var slice_cols(Var a, std::size_t start, std::size_t count) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  if (start + count > c) throw ValidationError("slice_cols out of range for " + x.shape_str());
  Tensor y(r, count);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < count; ++j) y(i, j) = x(i, start + j);
  const std::size_t ia = a.id();
  return t.record("slice_cols", std::move(y), {a}, [=](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < count; ++j) gx(i, start + j) += g(i, j);
  });
}

Var gather_rows(Var a, std::span<const std::size_t> rows) {
  Tape& t = tape_of(a);
  const Tensor& x = a.value();
  const std::size_t c = x.cols();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  Tensor y(idx.size(), c);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= x.rows()) throw ValidationError("gather_rows index out of range");
    std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(idx[i] * c), c,
                y.data().begin() + static_cast<std::ptrdiff_t>(i * c));
  }
  const std::size_t ia = a.id();
  return t.record("gather_rows", std::move(y), {a}, [=, idx = std::move(idx)](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) gx(idx[i], j) += g(i, j);
  });
}

Var masked_softmax(Var logits, const Mask& mask) {
  Tape& t = tape_of(logits);
  const Tensor& x = logits.value();
  const std::size_t r = x.rows(), c = x.cols();
  if (mask.rows != r || mask.cols != c || mask.bits.size() != r * c) {
    throw ValidationError("masked_softmax mask shape does not match logits " + x.shape_str());
  }
  Tensor y(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    double mx = -INFINITY;
    for (std::size_t j = 0; j < c; ++j) {
      if (mask.at(i, j)) mx = std::max(mx, x(i, j));
    }
    if (mx == -INFINITY) throw ValidationError("masked_softmax row " + std::to_string(i) + " has no unmasked entry");
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      if (mask.at(i, j)) {
        y(i, j) = std::exp(x(i, j) - mx);
        z += y(i, j);
      }
    }
    for (std::size_t j = 0; j < c; ++j) y(i, j) /= z;
  }
  const std::size_t ia = logits.id();
  return t.record("masked_softmax", std::move(y), {logits}, [=](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += g(i, j) * y(i, j);
      for (std::size_t j = 0; j < c; ++j) gx(i, j) += y(i, j) * (g(i, j) - dot);
    }
  });
}

Var softmax(Var logits) { return masked_softmax(logits, Mask::full(logits.rows(), logits.cols())); }

Var layernorm(Var x, Var gain, Var bias, double eps) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const std::size_t r = xv.rows(), c = xv.cols();
  const Tensor& gv = gain.value();
  const Tensor& bv = bias.value();
  if (gv.rows() != 1 || gv.cols() != c || !bv.same_shape(gv)) {
    throw ValidationError("layernorm gain/bias must be 1 x " + std::to_string(c));
  }
  Tensor xhat(r, c);
  std::vector<double> inv_std(r);
  Tensor y(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += xv(i, j);
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (xv(i, j) - mean) * (xv(i, j) - mean);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat(i, j) = (xv(i, j) - mean) * inv_std[i];
      y(i, j) = gv[j] * xhat(i, j) + bv[j];
    }
  }
  const std::size_t ix = x.id(), ig = gain.id(), ib = bias.id();
  return t.record("layernorm", std::move(y), {x, gain, bias},
                  [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, std::size_t self) {
                    const Tensor& g = t.grad(self);
                    if (t.needs_grad(ig)) {
                      Tensor& gg = t.grad(ig);
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j) gg[j] += g(i, j) * xhat(i, j);
                    }
                    if (t.needs_grad(ib)) {
                      Tensor& gb = t.grad(ib);
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j) gb[j] += g(i, j);
                    }
                    if (t.needs_grad(ix)) {
                      const Tensor& gv = t.value(ig);
                      Tensor& gx = t.grad(ix);
                      const double inv_c = 1.0 / static_cast<double>(c);
                      for (std::size_t i = 0; i < r; ++i) {
                        double m1 = 0.0, m2 = 0.0;
                        for (std::size_t j = 0; j < c; ++j) {
                          const double d = g(i, j) * gv[j];
                          m1 += d;
                          m2 += d * xhat(i, j);
                        }
                        m1 *= inv_c;
                        m2 *= inv_c;
                        for (std::size_t j = 0; j < c; ++j) {
                          const double d = g(i, j) * gv[j];
                          gx(i, j) += inv_std[i] * (d - m1 - xhat(i, j) * m2);
                        }
                      }
                    }
                  });
}

Var dropout(Var x, double p, bool training, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ValidationError("dropout p must be in [0, 1)");
  if (!training || p == 0.0) return x;
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mult(xv.size());
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    mult[i] = uniform01(rng) >= p ? keep_scale : 0.0;
    y[i] = xv[i] * mult[i];
  }
  const std::size_t ia = x.id();
  return t.record("dropout", std::move(y), {x}, [=, mult = std::move(mult)](Tape& t, std::size_t self) {
    if (!t.needs_grad(ia)) return;
    const Tensor& g = t.grad(self);
    Tensor& gx = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mult[i];
  });
}

}  // namespace ag

}  // namespace tcan
