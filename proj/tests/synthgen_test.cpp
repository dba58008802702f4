#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <array>

#include "tcan/synthgen.hpp"

using namespace tcan;

namespace {

std::vector<double> final_sizes(const GenConfig& g) {
  std::vector<double> s;
  for (const auto& c : generate(g)) s.push_back(static_cast<double>(c.size()));
  return s;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

}  // namespace

TEST(PowerLaw, XmaxZeroAlwaysZero) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_powerlaw(2.5, 0, rng), 0u);
}

TEST(PowerLaw, Normalization) {
  const PowerLaw pl(2.0, 2);
  const double z = 49.0 / 36.0;
  EXPECT_NEAR(pl.probability(0), 1.0 / z, 1e-15);
  EXPECT_NEAR(pl.probability(1), 0.25 / z, 1e-15);
  EXPECT_NEAR(pl.probability(2), (1.0 / 9.0) / z, 1e-15);
}

TEST(PowerLaw, EmpiricalFrequenciesMatch) {
  const PowerLaw pl(2.0, 2);
  Rng rng(5);
  std::array<double, 3> counts{};
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts[pl.sample(rng)] += 1;
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(counts[k] / n, pl.probability(k), 5e-3);
}

TEST(PowerLaw, LargeAlphaConcentratesAtZero) {
  Rng rng(3);
  double s = 0;
  for (int i = 0; i < 100000; ++i) s += double(sample_powerlaw(60.0, 100, rng));
  EXPECT_LT(s / 100000, 0.01);
}

TEST(PowerLaw, PositiveDrawsAndMeans) {
  const PowerLaw pl(2.5, 500);
  Rng rng(9);
  double s = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const auto k = pl.sample_positive(rng);
    ASSERT_GE(k, 1u);
    s += double(k);
  }
  double oracle = 0, z = 0;
  for (std::size_t k = 1; k <= 500; ++k) {
    const double w = std::pow(double(k + 1), -2.5);
    oracle += w * double(k);
    z += w;
  }
  EXPECT_NEAR(pl.mean_positive(), oracle / z, 1e-12);
  EXPECT_NEAR(s / n, oracle / z, 0.05);
}

TEST(Generate, ZeroBranchingGivesSingletons) {
  GenConfig g;
  g.branching_mean = 0.0;
  g.n_cascades = 50;
  for (const auto& c : generate(g)) EXPECT_EQ(c.size(), 1u);
}

TEST(Generate, Deterministic) {
  GenConfig g;
  g.n_cascades = 100;
  g.seed = 21;
  g.influence_sigma = 1.0;
  EXPECT_EQ(generate(g), generate(g));
  GenConfig h = g;
  h.seed = 22;
  EXPECT_NE(generate(g), generate(h));
}

TEST(Generate, RespectsBoundsAndInvariants) {
  GenConfig g;
  g.n_cascades = 300;
  g.max_size = 40;
  g.min_size = 5;
  g.n_users = 200;
  g.t_end = 3.0;
  g.influence_sigma = 0.5;
  for (const auto& c : generate(g)) {
    EXPECT_NO_THROW(validate_cascade(c));
    EXPECT_GE(c.size(), 5u);
    EXPECT_LE(c.size(), 40u);
    for (const auto& r : c.records) EXPECT_LE(r.join_time, 3.0);
    EXPECT_GE(c.publish_time, 0.0);
  }
}

TEST(Generate, MeanOffspringMatchesBranchingMean) {
  // Fully grown subcritical trees: (nodes - roots) / nodes -> mu.
  GenConfig g;
  g.n_cascades = 6000;
  g.branching_mean = 0.5;
  g.t_end = 1e9;
  g.seed = 4;
  double nodes = 0;
  for (const auto& c : generate(g)) nodes += double(c.size());
  EXPECT_NEAR((nodes - double(g.n_cascades)) / nodes, 0.5, 0.03);
}

TEST(Generate, MeanSizeGrowsWithBranching) {
  GenConfig g;
  g.n_cascades = 600;
  g.branching_mean = 0.5;
  const double low = mean(final_sizes(g));
  g.branching_mean = 0.9;
  const double high = mean(final_sizes(g));
  EXPECT_GT(high, low);
}

TEST(Generate, HeavierTailThanExponential) {
  GenConfig g;
  g.n_cascades = 2000;
  g.branching_mean = 0.9;
  g.powerlaw_alpha = 2.5;
  auto s = final_sizes(g);
  std::sort(s.begin(), s.end());
  // Share of total excess popularity (size - 1) held beyond the cut, against
  // an exponential fitted by maximum likelihood: (1 + rate c) exp(-rate c).
  double total = 0;
  for (double x : s) total += x - 1.0;
  const double rate = double(s.size()) / total;
  for (double q : {0.95, 0.99}) {
    const double cut = s[static_cast<std::size_t>(q * double(s.size() - 1))] - 1.0;
    double beyond = 0;
    for (double x : s) {
      if (x - 1.0 > cut) beyond += x - 1.0;
    }
    const double fitted = (1.0 + rate * cut) * std::exp(-rate * cut);
    EXPECT_GT(beyond / total, fitted) << "q=" << q << " cut=" << cut;
  }
}

TEST(Generate, MinSizeRedraws) {
  GenConfig g;
  g.n_cascades = 100;
  g.min_size = 10;
  for (const auto& c : generate(g)) EXPECT_GE(c.size(), 10u);
}

TEST(Generate, InfluenceSkewsOffspring) {
  GenConfig g;
  g.n_cascades = 3000;
  g.n_users = 500;
  g.influence_sigma = 1.5;
  g.t_end = 1e9;
  g.seed = 8;
  std::map<std::string, std::pair<double, double>> per_user;  // appearances, children
  for (const auto& c : generate(g)) {
    std::map<std::string, double> kids;
    for (const auto& r : c.records) {
      if (!r.is_root()) kids[r.parent] += 1;
    }
    for (const auto& r : c.records) {
      per_user[r.child].first += 1;
      per_user[r.child].second += kids[r.child];
    }
  }
  std::vector<double> rates;
  for (const auto& [u, ac] : per_user) {
    if (ac.first >= 20) rates.push_back(ac.second / ac.first);
  }
  ASSERT_GT(rates.size(), 20u);
  std::sort(rates.begin(), rates.end());
  EXPECT_GT(rates[rates.size() * 9 / 10], 3.0 * rates[rates.size() / 10] + 0.05);
}

TEST(Generate, RejectsBadConfigs) {
  GenConfig g;
  g.branching_mean = 50.0;
  EXPECT_THROW(generate(g), ValidationError);
  g = {};
  g.min_size = g.max_size + 1;
  EXPECT_THROW(generate(g), ValidationError);
  g = {};
  g.powerlaw_alpha = 1.0;
  EXPECT_THROW(generate(g), ValidationError);
  g = {};
  g.n_users = 10;
  EXPECT_THROW(generate(g), ValidationError);
}
