#include <benchmark/benchmark.h>

#include "gcnet/dgp.hpp"
#include "gcnet/lasso.hpp"

namespace {

gcnet::PanelData make_panel(int n, int t) {
  gcnet::RngStream rng(12345);
  gcnet::RngStream phi_rng = rng.child(0);
  const gcnet::CoefficientMatrix phi =
      gcnet::build_coefficient_matrix(n, 2, 0.4, 0.96, phi_rng);
  gcnet::RngStream sim_rng = rng.child(1);
  return gcnet::simulate_var(phi, gcnet::ErrorSpec::identity_normal(n), t, 50, sim_rng);
}

void FitAll(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const gcnet::PanelData panel = make_panel(n, 200);
  for (auto _ : state) {
    const gcnet::LassoFit fit = gcnet::fit_all(panel, 0.08);
    benchmark::DoNotOptimize(fit.coefficients.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(FitAll)->Arg(20)->Arg(50)->Arg(100)->Complexity();

void CrossValidation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const gcnet::PanelData panel = make_panel(n, 200);
  gcnet::RngStream rng(7);
  for (auto _ : state) {
    const gcnet::LambdaSelection sel = gcnet::select_lambda(
        panel, gcnet::LambdaStrategy::cross_validation(10, true), rng, {}, 1);
    benchmark::DoNotOptimize(sel.per_row.data());
  }
}
BENCHMARK(CrossValidation)->Arg(20)->Arg(50);

}  // namespace
