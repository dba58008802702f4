#include "tcan/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcan/error.hpp"
#include "tcan/rng.hpp"

namespace tcan {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

namespace {

double evaluate(const LossFn& f) {
  Tape tape;
  Var loss = f(tape);
  if (loss.value().size() != 1) throw ValidationError("grad_check loss must be scalar");
  return loss.value()[0];
}

}  // namespace

GradCheckReport grad_check(const LossFn& f, std::span<Parameter* const> params, const GradCheckOptions& opts) {
  if (!(opts.eps > 0.0)) throw ValidationError("grad_check eps must be positive");
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    Var loss = f(tape);
    tape.backward(loss);
  }
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) {
    analytic.push_back(p->grad);
    p->zero_grad();
  }

  GradCheckReport report;
  Rng rng = make_stream(opts.seed, "gradcheck");
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    const std::size_t n = p.value.size();
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (opts.max_coords_per_param > 0 && opts.max_coords_per_param < n) {
      for (std::size_t i = 0; i < opts.max_coords_per_param; ++i) {
        std::swap(coords[i], coords[i + uniform_index(rng, n - i)]);
      }
      coords.resize(opts.max_coords_per_param);
      std::sort(coords.begin(), coords.end());
    }
    GradCheckEntry entry;
    entry.name = p.name;
    for (std::size_t c : coords) {
      const double orig = p.value[c];
      p.value[c] = orig + opts.eps;
      const double up = evaluate(f);
      p.value[c] = orig - opts.eps;
      const double down = evaluate(f);
      p.value[c] = orig;
      const double numeric = (up - down) / (2.0 * opts.eps);
      const double a = analytic[k][c];
      entry.max_rel_error = std::max(entry.max_rel_error, relative_error(a, numeric));
      entry.max_abs_grad = std::max(entry.max_abs_grad, std::abs(a));
      ++entry.coords_checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.per_param.push_back(std::move(entry));
  }
  return report;
}

double grad_check(const LossFn& f, std::span<Parameter* const> params, double eps) {
  GradCheckOptions opts;
  opts.eps = eps;
  return grad_check(f, params, opts).max_rel_error;
}

}  // namespace tcan
