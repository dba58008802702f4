#include "tcan/optim.hpp"

#include <cmath>
#include <string>

#include "tcan/error.hpp"

namespace tcan {

void AdamHyper::validate() const {
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in (0, 1)");
  }
  if (!(eps > 0.0)) throw ValidationError("Adam eps must be positive");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight decay must be non-negative");
}

void adam_step(std::span<Parameter* const> params, const AdamHyper& h, std::int64_t t) {
  if (t < 1) throw ValidationError("adam_step index must be >= 1, got " + std::to_string(t));
  h.validate();
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  const double decay = 1.0 - h.lr * h.weight_decay;
  for (Parameter* p : params) {
    auto theta = p->value.data();
    auto g = p->grad.data();
    auto m = p->adam_m.data();
    auto v = p->adam_v.data();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      theta[i] = theta[i] * decay - h.lr * mhat / (std::sqrt(vhat) + h.eps);
    }
    if (!p->value.all_finite()) throw NumericalError("Adam produced non-finite values in '" + p->name + "'");
    p->zero_grad();
  }
}

}  // namespace tcan
