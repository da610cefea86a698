#include <benchmark/benchmark.h>

#include <random>

#include "flipspec/experiments.hpp"
#include "flipspec/krylov.hpp"
#include "flipspec/operators.hpp"
#include "flipspec/spectral.hpp"

using namespace flipspec;

namespace {

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Experiment fractional(int n) {
  ExperimentConfig c;
  c.experiment = ExperimentId::Ex2;
  c.n = MultiIndex({n, n});
  return make_experiment(c);
}

}  // namespace

static void BM_MatvecFractional(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Experiment e = fractional(n);
  const ToeplitzOperator op(e.f, e.config.n);
  const auto x = random_vector(op.dimension());
  std::vector<double> y(x.size());
  for (auto _ : state) {
    op.matvec(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_MatvecFractional)->Arg(20)->Arg(40)->Arg(80)->Arg(160);

static void BM_MatvecConvection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ToeplitzOperator op(convection_diffusion_symbol(n, n, n), MultiIndex({n, n, n}));
  const auto x = random_vector(op.dimension());
  std::vector<double> y(x.size());
  for (auto _ : state) {
    op.matvec(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_MatvecConvection)->Arg(10)->Arg(20)->Arg(40);

static void BM_MinresToepFr(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Experiment e = fractional(n);
  const auto p = make_preconditioner(e, PrecondId::ToepFr);
  const auto b = e.rhs();
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto r = flipped_solve(e.f, e.config.n, b, p.get());
    iterations = r.iterations;
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_MinresToepFr)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_MinresCircSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ExperimentConfig c;
  c.experiment = ExperimentId::Ex3;
  c.n = MultiIndex({n, n, n});
  const Experiment e = make_experiment(c);
  const auto p = make_preconditioner(e, PrecondId::CircSum);
  const auto b = e.rhs();
  for (auto _ : state) benchmark::DoNotOptimize(flipped_solve(e.f, e.config.n, b, p.get()).iterations);
}
BENCHMARK(BM_MinresCircSum)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_SymmetricEigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd s = flipped_dense(ex1_symbol(), MultiIndex({n, n}));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigenvalues(s).data());
}
BENCHMARK(BM_SymmetricEigenvalues)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
