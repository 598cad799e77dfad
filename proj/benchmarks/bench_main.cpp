#include <random>

#include <benchmark/benchmark.h>

#include "bregcvx/admm.hpp"
#include "bregcvx/gcg.hpp"
#include "bregcvx/omega_norm.hpp"
#include "bregcvx/spectral_geometry.hpp"
#include "bregcvx/synthetic.hpp"

namespace {

using namespace bregcvx;
using Eigen::MatrixXd;

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

Dataset planted(Eigen::Index t) {
  PlantedOptions o;
  o.clusters = 2;
  o.per_cluster = t / 2;
  o.features = 5;
  return planted_clusters(o);
}

void BM_Omega(benchmark::State& state) {
  const MatrixXd t = random_matrix(state.range(0), 20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(omega(t, 5));
}
BENCHMARK(BM_Omega)->Arg(50)->Arg(200)->Arg(700);

void BM_OmegaDualSubgradient(benchmark::State& state) {
  const MatrixXd r = random_matrix(state.range(0), 20, 2);
  for (auto _ : state) benchmark::DoNotOptimize(omega_dual_subgradient(r, 5));
}
BENCHMARK(BM_OmegaDualSubgradient)->Arg(50)->Arg(200)->Arg(700);

void BM_ProjectM2(benchmark::State& state) {
  const MatrixXd a = random_matrix(state.range(0), state.range(0), 3);
  const MatrixXd sym = 0.5 * (a + a.transpose());
  for (auto _ : state) benchmark::DoNotOptimize(project_m2(sym, 3));
}
BENCHMARK(BM_ProjectM2)->Arg(50)->Arg(200)->Arg(700)->Unit(benchmark::kMillisecond);

void BM_GcgEuclidean(benchmark::State& state) {
  const Dataset data = planted(state.range(0));
  MatrixLoss loss;
  loss.rows = data.x.rows();
  loss.cols = data.x.cols();
  loss.evaluate = [&](const MatrixXd& t, MatrixXd* grad) {
    if (grad) *grad = t - data.x;
    return 0.5 * (t - data.x).squaredNorm();
  };
  GcgOptions opt;
  opt.max_iter = 200;
  for (auto _ : state) benchmark::DoNotOptimize(gcg_minimize(loss, 0.1, OmegaNorm(2, NormGeometry::m2), opt));
}
BENCHMARK(BM_GcgEuclidean)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AdmmCondJc(benchmark::State& state) {
  const Dataset data = planted(state.range(0));
  AdmmOptions opt;
  opt.max_iter = 200;
  for (auto _ : state) benchmark::DoNotOptimize(admm_solve(data.x, 2, DivergenceFamily::euclidean(), opt));
}
BENCHMARK(BM_AdmmCondJc)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
