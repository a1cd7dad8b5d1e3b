#include <benchmark/benchmark.h>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/dyadic.hpp"
#include "harnacklab/harnack.hpp"
#include "harnacklab/inequalities.hpp"
#include "harnacklab/scale.hpp"

using namespace hlab;

static void BM_HarnackLattice(benchmark::State& state) {
  const MetricGraph mg(make_lattice2d(33));
  const double R = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harnack_constant(mg, 16 * 33 + 16, R, 2.0).C_H);
}
BENCHMARK(BM_HarnackLattice)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_HarnackTree(benchmark::State& state) {
  const MetricGraph mg(make_spherical_tree(std::vector<std::size_t>{2, 3, 4, 5}, 17));
  const double R = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harnack_constant(mg, 0, R, 2.0).C_H);
}
BENCHMARK(BM_HarnackTree)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_BallMeasure(benchmark::State& state) {
  const MetricGraph mg(make_lattice2d(33));
  const auto m = counting_measure(mg.graph());
  const double r = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_ball_measure(mg, m, 16 * 33 + 16, r).delta);
}
BENCHMARK(BM_BallMeasure)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_ChainMetric(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MetricGraph mg(make_lattice2d(n));
  for (auto _ : state) benchmark::DoNotOptimize(build_chain_metric(mg, [](Vertex, double t) { return t * t; }).K);
}
BENCHMARK(BM_ChainMetric)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

static void BM_Pipeline(benchmark::State& state) {
  const auto g = make_lattice2d(17);
  const auto m = counting_measure(g);
  PipelineOptions opt;
  opt.center = 8 * 17 + 8;
  opt.radii = {2.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(characterization_pipeline(g, m, opt).ok());
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);
