#include "tcan/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tcan/error.hpp"
#include "tcan/model.hpp"

namespace tcan {

std::vector<double> CascadeFeatures::design_row() const {
  std::vector<double> r;
  r.reserve(6 + cumulative.size());
  r.push_back(mean_interval);
  r.push_back(log2p1(size));
  for (double c : cumulative) r.push_back(log2p1(c));
  r.push_back(log2p1(leaf_count));
  r.push_back(log2p1(mean_degree));
  r.push_back(mean_path_length);
  r.push_back(max_path_length);
  return r;
}

std::vector<std::string> feature_names() {
  std::vector<std::string> n{"mean_interval", "size"};
  for (std::size_t k = 1; k < kPopularityBins; ++k) n.push_back("cumulative_" + std::to_string(k));
  n.insert(n.end(), {"leaf_count", "mean_degree", "mean_path_length", "max_path_length"});
  return n;
}

CascadeFeatures extract_features(const CascadeViews& v) {
  const auto& g = v.graph;
  const std::size_t n = g.size();
  if (n == 0) throw ValidationError("cascade " + v.cascade_id + " has no observed nodes");
  std::vector<double> join(n);
  for (std::size_t j = 0; j < n; ++j) join[v.sequence.nodes[j]] = v.sequence.times[j];

  CascadeFeatures f;
  f.size = static_cast<double>(n);
  std::vector<std::size_t> children(n, 0);
  std::vector<std::size_t> depth(n, 0);
  double gap_sum = 0.0, depth_sum = 0.0;
  // Dense order is join order, so a parent's depth is known before its children.
  for (std::size_t i = 0; i < n; ++i) {
    if (g.parent[i] < 0) continue;
    const auto p = static_cast<std::size_t>(g.parent[i]);
    ++children[p];
    depth[i] = depth[p] + 1;
    gap_sum += join[i] - join[p];
    depth_sum += static_cast<double>(depth[i]);
    f.max_path_length = std::max(f.max_path_length, static_cast<double>(depth[i]));
  }
  std::size_t internal = 0, edges = 0;
  for (std::size_t c : children) {
    if (c == 0) {
      f.leaf_count += 1.0;
    } else {
      ++internal;
      edges += c;
    }
  }
  if (n > 1) {
    f.mean_interval = gap_sum / static_cast<double>(n - 1);
    f.mean_path_length = depth_sum / static_cast<double>(n - 1);
    f.mean_degree = static_cast<double>(edges) / static_cast<double>(internal);
  }
  for (std::size_t k = 1; k < kPopularityBins; ++k) {
    const double cut = v.t_obs * static_cast<double>(k) / static_cast<double>(kPopularityBins);
    const auto c = std::upper_bound(v.sequence.times.begin(), v.sequence.times.end(), cut);
    f.cumulative.push_back(static_cast<double>(c - v.sequence.times.begin()));
  }
  return f;
}

namespace {

// In-place lower Cholesky of a symmetric d x d matrix; false if not PD.
bool cholesky(std::vector<double>& a, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    double s = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) s -= a[j * d + k] * a[j * d + k];
    if (!(s > 1e-12 * std::max(1.0, std::abs(a[j * d + j])))) return false;
    const double l = std::sqrt(s);
    a[j * d + j] = l;
    for (std::size_t i = j + 1; i < d; ++i) {
      double t = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) t -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = t / l;
    }
  }
  return true;
}

}  // namespace

std::vector<double> ridge_solve(std::span<const std::vector<double>> x, std::span<const double> y, double lambda) {
  if (x.empty()) throw ValidationError("ridge needs at least one sample");
  if (x.size() != y.size()) throw ValidationError("ridge design/target length mismatch");
  if (!(lambda >= 0.0)) throw ValidationError("ridge lambda must be >= 0");
  const std::size_t d = x[0].size();
  std::vector<double> a(d * d, 0.0), b(d, 0.0);
  for (std::size_t s = 0; s < x.size(); ++s) {
    const auto& r = x[s];
    if (r.size() != d) throw ValidationError("ragged ridge design matrix");
    for (std::size_t i = 0; i < d; ++i) {
      b[i] += r[i] * y[s];
      for (std::size_t j = 0; j <= i; ++j) a[i * d + j] += r[i] * r[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    a[i * d + i] += lambda;
    for (std::size_t j = 0; j < i; ++j) a[j * d + i] = a[i * d + j];
  }
  if (!cholesky(a, d)) throw NumericalError("ridge normal equations are singular");
  std::vector<double> w(b);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) w[i] -= a[i * d + k] * w[k];
    w[i] /= a[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    for (std::size_t k = i + 1; k < d; ++k) w[i] -= a[k * d + i] * w[k];
    w[i] /= a[i * d + i];
  }
  return w;
}

double RidgeModel::predict(std::span<const double> row) const {
  if (row.size() != weights.size()) throw ValidationError("ridge feature length mismatch");
  double o = intercept;
  for (std::size_t i = 0; i < row.size(); ++i) o += weights[i] * (row[i] - mean[i]) / scale[i];
  return o;
}

RidgeFit fit_ridge(std::span<const std::vector<double>> x, std::span<const double> y, double lambda) {
  if (x.empty()) throw ValidationError("ridge needs at least one sample");
  if (x.size() != y.size()) throw ValidationError("ridge design/target length mismatch");
  const std::size_t d = x[0].size();
  const double n = static_cast<double>(x.size());
  RidgeFit fit;
  RidgeModel& m = fit.model;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (const auto& r : x) {
    if (r.size() != d) throw ValidationError("ragged ridge design matrix");
    for (std::size_t i = 0; i < d; ++i) m.mean[i] += r[i] / n;
  }
  for (const auto& r : x) {
    for (std::size_t i = 0; i < d; ++i) m.scale[i] += (r[i] - m.mean[i]) * (r[i] - m.mean[i]) / n;
  }
  for (double& s : m.scale) s = s > 0.0 ? std::sqrt(s) : 1.0;
  double ybar = 0.0;
  for (double v : y) ybar += v / n;

  std::vector<std::vector<double>> z(x.size(), std::vector<double>(d));
  std::vector<double> yc(y.size());
  for (std::size_t s = 0; s < x.size(); ++s) {
    for (std::size_t i = 0; i < d; ++i) z[s][i] = (x[s][i] - m.mean[i]) / m.scale[i];
    yc[s] = y[s] - ybar;
  }
  m.intercept = ybar;
  m.lambda = lambda;
  for (;;) {
    try {
      m.weights = ridge_solve(z, yc, m.lambda);
      return fit;
    } catch (const NumericalError&) {
      const double next = m.lambda > 0.0 ? m.lambda * 10.0 : 1e-8;
      std::ostringstream msg;
      msg << "singular ridge system at lambda=" << m.lambda << ", retrying with lambda=" << next;
      fit.warnings.push_back(msg.str());
      m.lambda = next;
      if (m.lambda > 1e12) throw;
    }
  }
}

namespace {

struct Design {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
};

Design design(std::span<const CascadeViews> views) {
  Design d;
  for (const auto& v : views) {
    d.x.push_back(extract_features(v).design_row());
    d.y.push_back(log2p1(static_cast<double>(v.label)));
  }
  return d;
}

std::vector<PredictionRow> predict_rows(const RidgeModel& m, std::span<const CascadeViews> views,
                                        const Design& d) {
  std::vector<PredictionRow> rows;
  rows.reserve(views.size());
  for (std::size_t i = 0; i < views.size(); ++i) {
    rows.push_back({views[i].cascade_id, static_cast<double>(views[i].label), popularity_from_log(m.predict(d.x[i]))});
  }
  return rows;
}

}  // namespace

BaselineResult feature_baseline(const DatasetSplit& split, double lambda) {
  if (split.train.empty()) throw ValidationError("baseline needs a non-empty training split");
  if (split.test.empty()) throw ValidationError("baseline needs a non-empty test split");
  const Design train = design(split.train);
  const Design test = design(split.test);
  BaselineResult out;
  if (lambda >= 0.0) {
    RidgeFit fit = fit_ridge(train.x, train.y, lambda);
    out.model = std::move(fit.model);
    out.warnings = std::move(fit.warnings);
  } else {
    if (split.val.empty()) throw ValidationError("lambda selection needs a validation split");
    const Design val = design(split.val);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 100; ++k) {
      RidgeFit fit = fit_ridge(train.x, train.y, k / 100.0);
      const double msle = make_report(predict_rows(fit.model, split.val, val)).msle;
      if (msle < best) {
        best = msle;
        out.model = std::move(fit.model);
        out.warnings = std::move(fit.warnings);
      }
    }
  }
  out.report = make_report(predict_rows(out.model, split.test, test));
  return out;
}

EvalReport geometric_mean_baseline(const DatasetSplit& split) {
  if (split.train.empty() || split.test.empty()) throw ValidationError("geometric-mean baseline needs train and test");
  double mean = 0.0;
  for (const auto& v : split.train) mean += log2p1(static_cast<double>(v.label));
  mean /= static_cast<double>(split.train.size());
  const double pred = popularity_from_log(mean);
  std::vector<PredictionRow> rows;
  for (const auto& v : split.test) rows.push_back({v.cascade_id, static_cast<double>(v.label), pred});
  return make_report(std::move(rows));
}

}  // namespace tcan
