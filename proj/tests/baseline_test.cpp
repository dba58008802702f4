#include <gtest/gtest.h>

#include <cmath>

#include "tcan/baseline.hpp"
#include "tcan/synthgen.hpp"
#include "test_util.hpp"

using namespace tcan;
using tcan::testing::chain_cascade;
using tcan::testing::random_tensor;
using tcan::testing::star_cascade;

namespace {

// Gaussian elimination with partial pivoting on (X^T X + lambda I) w = X^T y.
std::vector<double> gauss_oracle(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                 double lambda) {
  const std::size_t d = x[0].size();
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t s = 0; s < x.size(); ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) a[i][j] += x[s][i] * x[s][j];
      a[i][d] += x[s][i] * y[s];
    }
  }
  for (std::size_t i = 0; i < d; ++i) a[i][i] += lambda;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= d; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = a[i][d] / a[i][i];
  return w;
}

DatasetSplit generated_split() {
  GenConfig g;
  g.n_cascades = 300;
  g.min_size = 3;
  g.max_size = 80;
  g.n_users = 200;
  g.branching_mean = 0.8;
  g.seed = 17;
  std::vector<CascadeViews> vs;
  for (const auto& c : generate(g)) vs.push_back(build_views(c, 1.0, 10.0));
  return split_dataset(std::move(vs), {}, 1);
}

}  // namespace

TEST(Features, Star) {
  const auto f = extract_features(build_views(star_cascade(), 60, 100));
  EXPECT_DOUBLE_EQ(f.mean_interval, 25.0);
  EXPECT_EQ(f.size, 5.0);
  EXPECT_EQ(f.leaf_count, 4.0);
  EXPECT_EQ(f.mean_degree, 4.0);
  EXPECT_EQ(f.mean_path_length, 1.0);
  EXPECT_EQ(f.max_path_length, 1.0);
  EXPECT_EQ(f.cumulative, (std::vector<double>{2, 3, 4, 5, 5}));
}

TEST(Features, Chain) {
  const auto f = extract_features(build_views(chain_cascade(5), 4, 10));
  EXPECT_DOUBLE_EQ(f.mean_interval, 1.0);
  EXPECT_EQ(f.leaf_count, 1.0);
  EXPECT_EQ(f.mean_degree, 1.0);
  EXPECT_DOUBLE_EQ(f.mean_path_length, 2.5);
  EXPECT_EQ(f.max_path_length, 4.0);
}

TEST(Features, SingletonAndNames) {
  const auto f = extract_features(build_views(chain_cascade(1), 4, 10));
  EXPECT_EQ(f.mean_interval, 0.0);
  EXPECT_EQ(f.leaf_count, 1.0);
  EXPECT_EQ(f.max_path_length, 0.0);
  EXPECT_EQ(f.design_row().size(), feature_names().size());
  EXPECT_DOUBLE_EQ(f.design_row()[1], 1.0);
}

TEST(Ridge, MatchesGaussianElimination) {
  Rng rng(4);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int s = 0; s < 40; ++s) {
    const Tensor r = random_tensor(1, 5, rng, -2, 2);
    x.emplace_back(r.data().begin(), r.data().end());
    y.push_back(3 * uniform01(rng));
  }
  for (double lambda : {0.0, 0.1, 10.0}) {
    const auto w = ridge_solve(x, y, lambda);
    const auto o = gauss_oracle(x, y, lambda);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w[i], o[i], 1e-10) << "lambda=" << lambda;
  }
}

TEST(Ridge, RecoversExactLinearMap) {
  Rng rng(5);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int s = 0; s < 30; ++s) {
    const double a = 10 * uniform01(rng), b = uniform01(rng) - 5;
    x.push_back({a, b});
    y.push_back(2 + 3 * a - b);
  }
  const RidgeFit fit = fit_ridge(x, y, 0.0);
  EXPECT_TRUE(fit.warnings.empty());
  for (std::size_t s = 0; s < x.size(); ++s) EXPECT_NEAR(fit.model.predict(x[s]), y[s], 1e-8);
  const std::vector<double> probe{100, 100};
  EXPECT_NEAR(fit.model.predict(probe), 202, 1e-8);
}

TEST(Ridge, SingularSystemRaisesLambda) {
  std::vector<std::vector<double>> x{{1, 2}, {2, 4}, {3, 6}};
  const std::vector<double> y{1, 2, 3};
  EXPECT_THROW(ridge_solve(x, y, 0.0), NumericalError);
  const RidgeFit fit = fit_ridge(x, y, 0.0);
  EXPECT_FALSE(fit.warnings.empty());
  EXPECT_GT(fit.model.lambda, 0.0);
  for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(fit.model.predict(x[s]), y[s], 1e-6);
}

TEST(Ridge, RejectsBadInput) {
  std::vector<std::vector<double>> x{{1.0}, {2.0, 3.0}};
  const std::vector<double> y{1, 2};
  EXPECT_THROW(ridge_solve(x, y, 0.0), ValidationError);
  EXPECT_THROW(ridge_solve(std::vector<std::vector<double>>{{1.0}}, y, 0.0), ValidationError);
  EXPECT_THROW(ridge_solve(std::vector<std::vector<double>>{{1.0}}, std::vector<double>{1.0}, -1.0),
               ValidationError);
}

TEST(FeatureBaseline, BeatsGeometricMean) {
  const DatasetSplit s = generated_split();
  const BaselineResult r = feature_baseline(s, -1.0);
  EXPECT_EQ(r.report.predictions.size(), s.test.size());
  EXPECT_GE(r.model.lambda, 0.01);
  EXPECT_LE(r.model.lambda, 1.0);
  EXPECT_LT(r.report.msle, geometric_mean_baseline(s).msle);
  EXPECT_EQ(feature_baseline(s, 0.3).model.lambda, 0.3);
}
