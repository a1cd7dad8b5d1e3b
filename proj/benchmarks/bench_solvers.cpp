#include <benchmark/benchmark.h>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/graph.hpp"
#include "harnacklab/metric.hpp"
#include "harnacklab/potential.hpp"

using namespace hlab;

namespace {

std::vector<Vertex> center_ball(const MetricGraph& mg, std::size_t n, double r) {
  return mg.ball(static_cast<Vertex>((n / 2) * n + n / 2), r);
}

}  // namespace

static void BM_Factorize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MetricGraph mg(make_lattice2d(n));
  const auto D = center_ball(mg, n, static_cast<double>(n) / 2.0);
  for (auto _ : state) {
    DomainProblem dp(mg.graph(), D);
    benchmark::DoNotOptimize(dp.size());
  }
  state.SetComplexityN(static_cast<std::int64_t>(D.size()));
}
BENCHMARK(BM_Factorize)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BM_GreenColumn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MetricGraph mg(make_lattice2d(n));
  const auto D = center_ball(mg, n, static_cast<double>(n) / 2.0);
  const DomainProblem dp(mg.graph(), D);
  const Vertex x = static_cast<Vertex>((n / 2) * n + n / 2);
  for (auto _ : state) benchmark::DoNotOptimize(green_column(dp, x));
  state.SetComplexityN(static_cast<std::int64_t>(D.size()));
}
BENCHMARK(BM_GreenColumn)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BM_Capacity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MetricGraph mg(make_lattice2d(n));
  const auto D = center_ball(mg, n, static_cast<double>(n) / 2.0);
  const auto A = center_ball(mg, n, static_cast<double>(n) / 8.0);
  for (auto _ : state) benchmark::DoNotOptimize(capacity(mg.graph(), A, D).capacity);
  state.SetComplexityN(static_cast<std::int64_t>(D.size()));
}
BENCHMARK(BM_Capacity)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BM_Distances(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_lattice2d(n);
  for (auto _ : state) {
    MetricGraph mg(g);
    benchmark::DoNotOptimize(mg.distance(0, g.size() - 1));
  }
}
BENCHMARK(BM_Distances)->Arg(17)->Arg(33);
