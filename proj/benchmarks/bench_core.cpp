#include <benchmark/benchmark.h>

#include <random>

#include "driverl/maps.hpp"
#include "driverl/mpc.hpp"
#include "driverl/rag.hpp"
#include "driverl/reward.hpp"
#include "driverl/vehicle.hpp"

using namespace driverl;

namespace {

void BM_RDrive(benchmark::State& state) {
  double e = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(r_drive(2.0, e));
    e += 1e-9;
  }
}
BENCHMARK(BM_RDrive);

void BM_ExtractParams(benchmark::State& state) {
  const std::string text =
      "<reasoning>keep it</reasoning>\nnew_mpc_params = {'qv': 10, 'qn': 20, 'qalpha': 7, 'qac': 0.01, "
      "'qddelta': 0.1, 'alat_max': 10, 'a_min': -5, 'a_max': 5, 'v_min': 1, 'v_max': 5, "
      "'track_safety_margin': 0.45}";
  for (auto _ : state) benchmark::DoNotOptimize(extract_params(text));
}
BENCHMARK(BM_ExtractParams);

void BM_FrenetProject(benchmark::State& state) {
  const auto& track = builtin_map(kEvalMap);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, track.total_length());
  std::vector<CartesianPose> poses;
  for (int i = 0; i < 256; ++i) poses.push_back(frenet_to_cartesian(track, {u(rng), 0.2, 0.1}, false));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = poses[i++ % poses.size()];
    benchmark::DoNotOptimize(frenet_project(track, p.position, p.heading, false));
  }
}
BENCHMARK(BM_FrenetProject);

void BM_StepDynamics(benchmark::State& state) {
  const auto& track = builtin_map(kTrainMap);
  VehicleState x{0.0, -1.0, 0.0, 0.05, 3.0};
  for (auto _ : state) {
    x = step_dynamics(x, {0.0, 0.0}, track, kSimDt);
    if (x.s > 40.0) x.s = 0.0;
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_StepDynamics);

void BM_MpcSolve(benchmark::State& state) {
  const auto& track = builtin_map(state.range(0) == 0 ? kTrainMap : kEvalMap);
  MpcController mpc(track, default_params());
  const VehicleState x0 = initial_state(track);
  for (auto _ : state) {
    mpc.reset();
    benchmark::DoNotOptimize(mpc.solve(x0));
  }
}
BENCHMARK(BM_MpcSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Retrieve(benchmark::State& state) {
  const auto& store = default_mpc_memories();
  for (auto _ : state) benchmark::DoNotOptimize(store.retrieve("Reverse the car slowly", 5));
}
BENCHMARK(BM_Retrieve);

}  // namespace

BENCHMARK_MAIN();
