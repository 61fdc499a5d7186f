#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>

#include "tjflow/diagnostics.hpp"
#include "tjflow/domain.hpp"
#include "tjflow/evolution.hpp"
#include "tjflow/linear_stability.hpp"
#include "tjflow/parameterization.hpp"
#include "tjflow/stationary.hpp"

namespace {

using namespace tjflow;

const ImplicitDomain& trefoil() {
  static const ImplicitDomain d = ImplicitDomain::polynomial(
      {{4, 0, 1}, {2, 2, 2}, {0, 4, 1}, {3, 0, 2}, {1, 2, -6}, {2, 0, 1}, {0, 2, 1}, {0, 0, -4}},
      {-3, 3, -3, 3});
  return d;
}

const StationaryNetwork& trefoil_network() {
  static const StationaryNetwork net = [] {
    SteadyGuess g;
    g.p = {0.02, 0.01};
    g.phi = 0.05;
    return find_stationary(trefoil(), SurfaceTensions{}, g);
  }();
  return net;
}

void BM_FindStationary(benchmark::State& state) {
  SteadyGuess g;
  g.p = {0.02, 0.01};
  g.phi = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(find_stationary(trefoil(), SurfaceTensions{}, g));
}
BENCHMARK(BM_FindStationary)->Unit(benchmark::kMillisecond);

void BM_MaxEigenvalue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(max_eigenvalue(trefoil_network(), n));
}
BENCHMARK(BM_MaxEigenvalue)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StationaryNetwork& net = trefoil_network();
  const GraphModel model(net, trefoil());
  EvolveConfig cfg;
  cfg.n = n;
  const double lmin = *std::min_element(net.length.begin(), net.length.end());
  cfg.dt = 0.4 * std::pow(lmin / n, 2);
  const GraphState init = initial_state(model, eigenmode_perturbation(net, n, 1e-2), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(step(model, init, cfg));
}
BENCHMARK(BM_Step)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_SampleNetwork(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const StationaryNetwork& net = trefoil_network();
  const GraphModel model(net, trefoil());
  EvolveConfig cfg;
  cfg.n = n;
  const GraphState init = initial_state(model, eigenmode_perturbation(net, n, 1e-2), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sample_network(model, init));
}
BENCHMARK(BM_SampleNetwork)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
