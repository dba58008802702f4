#include <gtest/gtest.h>

#include <cmath>

#include "tcan/model.hpp"
#include "tcan/synthgen.hpp"
#include "test_util.hpp"

using namespace tcan;
using tcan::testing::fd_check;
using tcan::testing::make_cascade;

namespace {

ModelConfig narrow(Variant v = Variant::Full) {
  ModelConfig c;
  c.d = 4;
  c.d_t = 4;
  c.cgat_layers = 2;
  c.heads = 2;
  c.csat_layers = 2;
  c.d_h = 4;
  c.mlp_hidden = {6};
  c.variant = v;
  return c;
}

Cascade tree() {
  return make_cascade("tree", {{"", "A", 0}, {"A", "B", 3}, {"A", "C", 7}, {"B", "D", 12}, {"C", "E", 20}, {"D", "F", 31}});
}

std::unique_ptr<TcanModel> make_model(const ModelConfig& cfg, const CascadeViews& v) {
  std::vector<CascadeViews> vs{v};
  return std::make_unique<TcanModel>(cfg, Vocabulary::from_views(vs), TimeScales::from_views(vs));
}

CascadeViews scaled(const Cascade& c, double k, double t_obs, double t_end) {
  Cascade s = c;
  for (auto& r : s.records) r.join_time *= k;
  return build_views(s, t_obs * k, t_end * k);
}

}  // namespace

TEST(Model, VariantsRegisterExpectedParameters) {
  const auto v = build_views(tree(), 25, 40);
  auto has = [&](Variant var, const std::string& prefix) {
    return !make_model(narrow(var), v)->params().with_prefix(prefix).empty();
  };
  EXPECT_TRUE(has(Variant::Full, "te.w_s"));
  EXPECT_FALSE(has(Variant::PL, "te.w_s"));
  EXPECT_FALSE(has(Variant::NT, "te."));
  EXPECT_FALSE(has(Variant::G, "csat."));
  EXPECT_FALSE(has(Variant::S, "cgat."));
  EXPECT_FALSE(has(Variant::RNN, "csat.ap."));
  EXPECT_TRUE(has(Variant::RNN, "csat.layer1."));
  EXPECT_EQ(make_model(narrow(Variant::PL), v)->params().get("te.omega").value.cols(), 3u);
  EXPECT_EQ(make_model(narrow(Variant::Full), v)->params().get("te.omega").value.cols(), 2u);
  EXPECT_EQ(make_model(narrow(Variant::NT), v)->params().get("cgat.layer0.w_q").value.rows(), 4u);
}

TEST(Model, SharedNamesShareInitialValues) {
  const auto v = build_views(tree(), 25, 40);
  auto full = make_model(narrow(), v);
  auto g = make_model(narrow(Variant::G), v);
  for (const Parameter* p : g->params().all()) {
    EXPECT_TRUE(p->value == full->params().get(p->name).value) << p->name;
  }
}

TEST(Model, GraphOnlyEqualsFullWithSequenceRowsZeroed) {
  const auto v = build_views(tree(), 25, 40);
  auto full = make_model(narrow(), v);
  auto g = make_model(narrow(Variant::G), v);
  Tensor& w = full->params().get("mlp.layer0.w").value;
  const std::size_t width = full->config().width();
  for (std::size_t i = width; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = 0.0;
  }
  EXPECT_EQ(full->predict_log(v), g->predict_log(v));
  Tape tape;
  const Tensor hs = g->forward(tape, v, false).sequence_repr.value();
  for (double x : hs.data()) EXPECT_EQ(x, 0.0);
}

TEST(Model, EvalIsDeterministicAndDropoutIsNot) {
  const auto v = build_views(tree(), 25, 40);
  ModelConfig cfg = narrow();
  cfg.dropout = 0.5;
  auto m = make_model(cfg, v);
  EXPECT_EQ(m->predict_log(v), m->predict_log(v));
  Rng rng(1);
  Tape tape;
  const double a = m->forward(tape, v, true, &rng).output.value()[0];
  const double b = m->forward(tape, v, true, &rng).output.value()[0];
  EXPECT_NE(a, b);
  EXPECT_THROW(m->forward(tape, v, true), ValidationError);
}

TEST(Model, SingleNodeCascade) {
  const auto v = build_views(make_cascade("one", {{"", "A", 0}}), 1, 2);
  for (Variant var : {Variant::Full, Variant::NT, Variant::PL, Variant::G, Variant::S, Variant::RNN}) {
    EXPECT_TRUE(std::isfinite(make_model(narrow(var), v)->predict_log(v))) << to_string(var);
  }
}

TEST(Model, NoTimeVariantIgnoresTimestamps) {
  const auto v = build_views(tree(), 25, 40);
  auto m = make_model(narrow(Variant::NT), v);
  EXPECT_EQ(m->predict_log(v), m->predict_log(scaled(tree(), 3.5, 25, 40)));
}

TEST(Model, NormalizedTimeIsScaleInvariant) {
  ModelConfig cfg = narrow();
  cfg.normalize_time = true;
  const auto a = build_views(tree(), 25, 40);
  const auto b = scaled(tree(), 60.0, 25, 40);
  auto ma = make_model(cfg, a);
  auto mb = make_model(cfg, b);
  EXPECT_NEAR(ma->predict_log(a), mb->predict_log(b), 1e-9);
}

TEST(Model, PopularityMapping) {
  EXPECT_DOUBLE_EQ(popularity_from_log(3.0), 7.0);
  EXPECT_DOUBLE_EQ(popularity_from_log(0.0), 0.0);
  EXPECT_DOUBLE_EQ(popularity_from_log(-2.0), 0.0);
}

TEST(Model, CheckpointRoundTripIsBitwise) {
  GenConfig g;
  g.n_cascades = 5;
  g.min_size = 5;
  g.max_size = 50;
  g.n_users = 200;
  std::vector<CascadeViews> vs;
  for (const auto& c : generate(g)) vs.push_back(build_views(c, 1.0, 5.0));
  ModelConfig cfg = narrow(Variant::RNN);
  cfg.normalize_time = true;
  cfg.mask = MaskMode::Symmetric;
  cfg.residual = ResidualMode::Conventional;
  TcanModel m(cfg, Vocabulary::from_views(vs), TimeScales::from_views(vs));
  const auto back = TcanModel::from_checkpoint(checkpoint_from_string(checkpoint_to_string(m.to_checkpoint())));
  EXPECT_EQ(back->config().to_json(), cfg.to_json());
  for (const auto& v : vs) EXPECT_EQ(back->predict_log(v), m.predict_log(v));
}

TEST(Model, UnknownNodeIsRejected) {
  auto m = make_model(narrow(), build_views(tree(), 25, 40));
  EXPECT_THROW(m->predict(build_views(tcan::testing::chain_cascade(3), 25, 40)), ValidationError);
}

TEST(Model, FullGradientsMatchFiniteDifferences) {
  const auto v = build_views(tree(), 25, 40);
  for (Variant var : {Variant::Full, Variant::RNN}) {
    auto m = make_model(narrow(var), v);
    auto f = [&](Tape& t) {
      Var d = ag::sub(m->forward(t, v, false).output, t.constant(Tensor::scalar(2.0)));
      return ag::mul(d, d);
    };
    EXPECT_LT(fd_check(f, m->params().all(), 1e-5), 1e-4) << to_string(var);
  }
}
