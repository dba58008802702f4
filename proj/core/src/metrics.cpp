#include "tcan/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tcan/error.hpp"

namespace tcan {

double log2p1(double x) {
  if (!(x > -1.0)) throw ValidationError("log2(x + 1) needs x > -1");
  return std::log2(x + 1.0);
}

double msle_loss(std::span<const double> y, std::span<const double> y_hat) {
  if (y.empty()) throw ValidationError("msle of an empty set");
  if (y.size() != y_hat.size()) throw ValidationError("msle length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = log2p1(y[i]) - log2p1(y_hat[i]);
    s += d * d;
  }
  return s / static_cast<double>(y.size());
}

Metrics compute_metrics(std::span<const double> y, std::span<const double> y_hat) {
  if (y.empty()) throw ValidationError("metrics of an empty set");
  if (y.size() != y_hat.size()) throw ValidationError("metrics length mismatch");
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += log2p1(v);
  mean /= n;
  double sse = 0.0, sae = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double ly = log2p1(y[i]);
    const double d = log2p1(y_hat[i]) - ly;
    sse += d * d;
    sae += std::abs(d);
    sst += (ly - mean) * (ly - mean);
  }
  Metrics m;
  m.msle = sse / n;
  m.mae = sae / n;
  if (sst > 0.0) {
    m.r2 = 1.0 - sse / sst;
  } else {
    m.r2 = sse == 0.0 ? 1.0 : 0.0;
  }
  return m;
}

EvalReport make_report(std::vector<PredictionRow> rows) {
  std::vector<double> y, y_hat;
  y.reserve(rows.size());
  y_hat.reserve(rows.size());
  for (const auto& r : rows) {
    y.push_back(r.y);
    y_hat.push_back(r.y_hat);
  }
  const Metrics m = compute_metrics(y, y_hat);
  EvalReport rep;
  rep.msle = m.msle;
  rep.mae = m.mae;
  rep.r2 = m.r2;
  rep.predictions = std::move(rows);
  return rep;
}

std::string EvalReport::to_json() const {
  using nlohmann::json;
  json j;
  j["msle"] = msle;
  j["mae"] = mae;
  j["r2"] = r2;
  j["n"] = predictions.size();
  json preds = json::array();
  for (const auto& p : predictions) preds.push_back({{"id", p.id}, {"y", p.y}, {"y_hat", p.y_hat}});
  j["predictions"] = std::move(preds);
  json curves_j = json::array();
  for (const auto& e : curves) {
    curves_j.push_back({{"epoch", e.epoch},
                        {"steps", e.steps},
                        {"train_loss", e.train_loss},
                        {"val_msle", e.val_msle},
                        {"improved", e.improved}});
  }
  j["curves"] = std::move(curves_j);
  return j.dump(2);
}

std::string EvalReport::predictions_csv() const {
  std::ostringstream os;
  os << "id,y,y_hat\n";
  char buf[64];
  for (const auto& p : predictions) {
    os << p.id << ',';
    auto r1 = std::to_chars(buf, buf + sizeof buf, p.y);
    os.write(buf, r1.ptr - buf);
    os << ',';
    auto r2 = std::to_chars(buf, buf + sizeof buf, p.y_hat);
    os.write(buf, r2.ptr - buf);
    os << '\n';
  }
  return os.str();
}

}  // namespace tcan
