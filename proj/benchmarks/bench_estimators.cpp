#include <benchmark/benchmark.h>

#include "jointloc/harness.hpp"
#include "jointloc/sim.hpp"

namespace
{

using namespace jointloc;

const Scene& scene()
{
  static const Scene s = arena_scene();
  return s;
}

Epoch epoch(int i)
{
  static const auto tps = default_test_points();
  const std::size_t tp = static_cast<std::size_t>(i) % tps.size();
  return synthesize_epoch(scene(), tps[tp], tp, i, 0.0, 1);
}

void BM_JointLogLikelihood(benchmark::State& state)
{
  const Epoch e = epoch(0);
  const JointProblem problem(scene(), e.toa, e.aoa);
  JointGradient g;
  const Eigen::Vector3d x(9.0, 4.0, 1.5);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(problem.log_likelihood(x, 0.3, state.range(0) != 0 ? &g : nullptr));
  }
}
BENCHMARK(BM_JointLogLikelihood)->Arg(0)->Arg(1);

void BM_Estimate(benchmark::State& state)
{
  const auto algorithm = static_cast<Algorithm>(state.range(0));
  const SolverConfig config = SolverConfig::for_world(scene().bounds);
  std::vector<Epoch> epochs;
  for (int i = 0; i < 28; ++i)
  {
    epochs.push_back(epoch(i));
  }
  std::size_t i = 0;
  for (auto _ : state)
  {
    const Epoch& e = epochs[i++ % epochs.size()];
    benchmark::DoNotOptimize(run_algorithm(algorithm, scene(), e.toa, e.aoa, config));
  }
  state.SetLabel(std::string(to_string(algorithm)));
}
BENCHMARK(BM_Estimate)
    ->Arg(static_cast<int>(Algorithm::ToaNls))
    ->Arg(static_cast<int>(Algorithm::ToaMap))
    ->Arg(static_cast<int>(Algorithm::Aoa))
    ->Arg(static_cast<int>(Algorithm::Joint))
    ->Unit(benchmark::kMicrosecond);

void BM_SynthesizeEpoch(benchmark::State& state)
{
  const TestPoint tp{"A01", Point3(1.5, 1.5, 1.0)};
  int i = 0;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(synthesize_epoch(scene(), tp, 0, i++, 0.5, 7));
  }
}
BENCHMARK(BM_SynthesizeEpoch);

} // namespace

BENCHMARK_MAIN();
