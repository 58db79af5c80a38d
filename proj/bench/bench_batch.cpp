#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "sphfit/batch.hpp"
#include "sphfit/geometry.hpp"
#include "sphfit/kernels.hpp"

using namespace sphfit;

namespace {

Eigen::MatrixXd nodes(benchmark::State& state) {
  return fibonacci_points(static_cast<std::size_t>(state.range(0))).coords();
}

template <auto Gram>
void BM_gram(benchmark::State& state) {
  const Kernel k = make_gaussian_chordal(0.3);
  const Eigen::MatrixXd p = nodes(state);
  for (auto _ : state) benchmark::DoNotOptimize(Gram(k, p));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) / 2);
}

template <auto Expand>
void BM_expand(benchmark::State& state) {
  const Kernel k = make_wendland();
  const Eigen::MatrixXd c = nodes(state);
  const Eigen::VectorXd a = Eigen::VectorXd::Ones(c.cols());
  const Eigen::MatrixXd at = spiral_points(10000).coords();
  for (auto _ : state) benchmark::DoNotOptimize(Expand(k, c, a, at));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 10000);
}

template <auto MaxDot>
void BM_max_dot(benchmark::State& state) {
  const Eigen::MatrixXd p = nodes(state);
  const Eigen::MatrixXd probes = spiral_points(20000).coords();
  for (auto _ : state) benchmark::DoNotOptimize(MaxDot(probes, p));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20000);
}

template <auto Harmonics>
void BM_harmonics(benchmark::State& state) {
  const Eigen::MatrixXd p = nodes(state);
  for (auto _ : state) benchmark::DoNotOptimize(Harmonics(p, 45));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_gram<batch::serial::gram>)->Name("gram/serial")->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram<batch::omp::gram>)->Name("gram/omp")->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_expand<batch::serial::expand>)->Name("expand/serial")->Arg(1038)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_expand<batch::omp::expand>)->Name("expand/omp")->Arg(1038)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_max_dot<batch::serial::max_dot>)->Name("max_dot/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_max_dot<batch::omp::max_dot>)->Name("max_dot/omp")->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_harmonics<batch::serial::harmonics>)->Name("harmonics/serial")->Arg(1038)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_harmonics<batch::omp::harmonics>)->Name("harmonics/omp")->Arg(1038)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
