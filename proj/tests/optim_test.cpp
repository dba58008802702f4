#include <gtest/gtest.h>

#include <cmath>

#include "tcan/optim.hpp"
#include "test_util.hpp"

using namespace tcan;

namespace {

/// Textbook Adam with decoupled decay, written out independently.
struct RefAdam {
  double m = 0, v = 0;
  double step(double theta, double g, int t, const AdamHyper& h) {
    m = h.beta1 * m + (1 - h.beta1) * g;
    v = h.beta2 * v + (1 - h.beta2) * g * g;
    theta -= h.lr * h.weight_decay * theta;
    return theta - h.lr * (m / (1 - std::pow(h.beta1, t))) / (std::sqrt(v / (1 - std::pow(h.beta2, t))) + h.eps);
  }
};

}  // namespace

TEST(Adam, ZeroGradNoDecayIsNoop) {
  ParameterStore s;
  Parameter& p = s.add("p", Tensor::matrix({{1.5, -2}}));
  AdamHyper h;
  h.weight_decay = 0;
  adam_step(s.all(), h, 1);
  EXPECT_EQ(p.value, Tensor::matrix({{1.5, -2}}));
}

TEST(Adam, FirstStepIsSignScaled) {
  ParameterStore s;
  Parameter& p = s.add("p", Tensor::matrix({{1, 1, 1}}));
  p.grad = Tensor::matrix({{0.3, -7, 1e-3}});
  AdamHyper h;
  h.weight_decay = 0;
  h.lr = 0.01;
  adam_step(s.all(), h, 1);
  EXPECT_NEAR(p.value[0], 1 - 0.01, 1e-9);
  EXPECT_NEAR(p.value[1], 1 + 0.01, 1e-9);
  EXPECT_NEAR(p.value[2], 1 - 0.01, 1e-7);
  EXPECT_EQ(p.grad, Tensor(1, 3));
}

TEST(Adam, MatchesReferenceWithDecay) {
  ParameterStore s;
  Parameter& p = s.add("p", Tensor::scalar(0.8));
  AdamHyper h;
  h.lr = 0.05;
  h.weight_decay = 0.1;
  RefAdam ref;
  double theta = 0.8;
  for (int t = 1; t <= 20; ++t) {
    const double g = std::sin(t) + 0.3 * p.value[0];
    p.grad[0] = g;
    adam_step(s.all(), h, t);
    theta = ref.step(theta, g, t, h);
    EXPECT_NEAR(p.value[0], theta, 1e-15);
  }
}

TEST(Adam, ConvergesOnQuadratic) {
  ParameterStore s;
  Parameter& p = s.add("p", Tensor::matrix({{0, 0, 0}}));
  const Tensor c = Tensor::matrix({{0.5, -0.25, 0.125}});
  AdamHyper h;
  h.lr = 0.05;
  h.weight_decay = 0;
  for (int t = 1; t <= 200; ++t) {
    Tape tape;
    Var d = ag::sub(tape.param(p), tape.constant(c));
    tape.backward(ag::sum_all(ag::mul(d, d)));
    adam_step(s.all(), h, t);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p.value[i], c[i], 1e-3);
}

TEST(Adam, RejectsBadInput) {
  ParameterStore s;
  s.add("p", Tensor::scalar(1));
  EXPECT_THROW(adam_step(s.all(), AdamHyper{}, 0), ValidationError);
  AdamHyper h;
  h.lr = -1;
  EXPECT_THROW(adam_step(s.all(), h, 1), ValidationError);
}
