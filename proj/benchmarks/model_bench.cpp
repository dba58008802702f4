#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "tcan/model.hpp"
#include "tcan/synthgen.hpp"
#include "tcan/trainer.hpp"

using namespace tcan;

namespace {

// Random recursive tree: node k picks a uniform earlier parent.
CascadeViews random_views(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Cascade c;
  c.id = "bench";
  c.root = "u0";
  c.records.push_back({"", "u0", 0.0});
  double t = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    t += uniform01(rng);
    const auto p = uniform_index(rng, k);
    c.records.push_back({"u" + std::to_string(p), "u" + std::to_string(k), t});
  }
  return build_views(c, t + 1.0, t + 2.0);
}

struct Fixture {
  CascadeViews views;
  std::unique_ptr<TcanModel> model;

  explicit Fixture(std::size_t n) : views(random_views(n, n)) {
    std::vector<CascadeViews> vs{views};
    model = std::make_unique<TcanModel>(ModelConfig{}, Vocabulary::from_views(vs), TimeScales::from_views(vs));
  }
};

void BM_Forward(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(f.model->predict_log(f.views));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Forward)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ForwardBackward(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  Rng rng(7);
  for (auto _ : state) {
    Tape tape;
    auto res = f.model->forward(tape, f.views, true, &rng);
    tape.backward(sample_loss(tape, res.output, 3.0));
    f.model->params().zero_grad();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond)->Complexity();

void BM_BuildViews(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(random_views(n, 3));
}
BENCHMARK(BM_BuildViews)->Arg(50)->Arg(200);

void BM_Generate(benchmark::State& state) {
  GenConfig g;
  g.n_cascades = 100;
  g.n_users = 500;
  g.influence_sigma = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(g));
}
BENCHMARK(BM_Generate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
