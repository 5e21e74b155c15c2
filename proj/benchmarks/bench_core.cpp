#include <benchmark/benchmark.h>

#include "roadflow/assignment.hpp"
#include "roadflow/congestion.hpp"
#include "roadflow/geometry.hpp"
#include "roadflow/neural/model.hpp"
#include "roadflow/rng.hpp"
#include "roadflow/scenario.hpp"
#include "roadflow/tracker.hpp"

using namespace roadflow;

namespace {

void BM_HungarianAssign(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cost(i, j) = rng.uniform();
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(hungarian_assign(cost));
  }
}
BENCHMARK(BM_HungarianAssign)->Arg(5)->Arg(20)->Arg(50)->Arg(100);

void BM_DiouNms(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < n; ++i) {
    boxes.push_back({rng.uniform(0, 1920), rng.uniform(0, 1080),
                     rng.uniform(20, 120), rng.uniform(20, 90), rng.uniform(),
                     0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(diou_nms(boxes, 0.5, 0.3));
  }
}
BENCHMARK(BM_DiouNms)->Arg(50)->Arg(200)->Arg(1000);

void BM_TrackerStep(benchmark::State& state) {
  const int vehicles = static_cast<int>(state.range(0));
  TrajectoryScenario scenario =
      TrajectoryScenario::occlusion_benchmark(vehicles, vehicles / 4, 3);
  const TrajectoryData data = generate_trajectories(scenario);
  for (auto _ : state) {
    Tracker tracker;
    for (std::size_t f = 1; f < data.detections.size(); ++f) {
      benchmark::DoNotOptimize(tracker.step(data.detections[f]));
    }
  }
}
BENCHMARK(BM_TrackerStep)->Arg(8)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GruForwardBackward(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  Rng rng(4);
  neural::ModelParams params = neural::ModelParams::init(
      {neural::ModelKind::gru_attention, 3, hidden, hidden / 2}, rng);
  std::vector<WindowedSample> batch;
  for (int i = 0; i < 64; ++i) {
    WindowedSample s;
    s.sequence.resize(10, 3);
    for (int t = 0; t < 10; ++t) {
      for (int f = 0; f < 3; ++f) {
        s.sequence(t, f) = rng.normal();
      }
    }
    s.label = i % 2;
    batch.push_back(std::move(s));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(neural::loss_and_gradients(params, batch));
  }
}
BENCHMARK(BM_GruForwardBackward)->Arg(16)->Arg(32)->Arg(64)
    ->Unit(benchmark::kMillisecond);

void BM_SustainedCongestion(benchmark::State& state) {
  const long n = state.range(0);
  Rng rng(5);
  std::vector<double> rho(static_cast<std::size_t>(n));
  for (double& r : rho) {
    r = rng.uniform(0.0, 0.03);
  }
  const CongestionConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sustained_congestion(rho, cfg));
  }
}
BENCHMARK(BM_SustainedCongestion)->Arg(3600)->Arg(36000)
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
