#include <benchmark/benchmark.h>

#include "gcnet/clime.hpp"
#include "gcnet/rng.hpp"

namespace {

Eigen::MatrixXd make_sigma(int p) {
  gcnet::RngStream rng(99);
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() / p + Eigen::MatrixXd::Identity(p, p);
}

void ClimeColumn(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Eigen::MatrixXd sigma = make_sigma(p);
  for (auto _ : state) {
    const Eigen::VectorXd theta = gcnet::clime_column(sigma, p / 2, 0.05);
    benchmark::DoNotOptimize(theta.data());
  }
  state.SetComplexityN(p);
}
BENCHMARK(ClimeColumn)->Arg(20)->Arg(50)->Arg(100)->Complexity();

void ClimeFull(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Eigen::MatrixXd sigma = make_sigma(p);
  for (auto _ : state) {
    const gcnet::PrecisionEstimate est = gcnet::estimate_precision(sigma, 0.05, 0.0, 1);
    benchmark::DoNotOptimize(est.omega.data());
  }
}
BENCHMARK(ClimeFull)->Arg(20)->Arg(50);

}  // namespace
