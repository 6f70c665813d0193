#include <doctest.h>

#include <cmath>

#include "gcnet/bootstrap.hpp"
#include "gcnet/dgp.hpp"
#include "oracles.hpp"

using namespace gcnet;

namespace {

struct NullPipeline {
  PanelData panel;
  LassoFit fit;
  PrecisionEstimate precision;
  HypothesisSet hypotheses;
};

// Global-null data: zero coefficients, unit-variance normal errors.
NullPipeline make_null(std::uint64_t seed, int n, int t) {
  NullPipeline p;
  CoefficientMatrix zero{Eigen::MatrixXd::Zero(n, n), VarDims{n, 1, t}};
  RngStream rng(seed);
  RngStream sim_rng = rng.child(0);
  p.panel = simulate_var(zero, ErrorSpec::identity_normal(n), t, 20, sim_rng);
  RngStream sel_rng = rng.child(1);
  const LambdaSelection sel =
      select_lambda(p.panel, LambdaStrategy::cross_validation(10, true), sel_rng);
  p.fit = fit_all(p.panel, sel.per_row);
  p.precision = estimate_precision(sample_covariance(p.panel), Lambda1Strategy::constraint_path());
  p.hypotheses = HypothesisSet::full(n, n);
  return p;
}

}  // namespace

TEST_CASE("pooled null 97.5% quantile is near the normal value on null data") {
  NullPipeline p = make_null(99, 20, 200);
  BootstrapOptions options;
  options.b_draws = 100;
  const BootstrapNull null =
      bootstrap_null(p.panel, p.fit, p.precision, p.fit.active_sets, p.hypotheses, options,
                     SeVariant::Sandwich, RngStream(17), 2);
  const std::size_t size = null.sorted_t_values.size();
  const double q975 = null.sorted_t_values[static_cast<std::size_t>(0.975 * size)];
  MESSAGE("pooled null 97.5% quantile = ", q975);
  CHECK(q975 >= 1.7);
  CHECK(q975 <= 2.3);
}

TEST_CASE("pooled null is nearly centered under Rademacher multipliers") {
  NullPipeline p = make_null(103, 12, 150);
  BootstrapOptions options;
  options.b_draws = 100;
  options.multiplier = MultiplierKind::Rademacher;
  const BootstrapNull null =
      bootstrap_null(p.panel, p.fit, p.precision, p.fit.active_sets, p.hypotheses, options,
                     SeVariant::Sandwich, RngStream(19), 2);
  double mean = 0.0;
  for (double v : null.sorted_t_values) mean += v;
  mean /= null.sorted_t_values.size();
  MESSAGE("pooled null mean = ", mean);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(null.sorted_t_values.size())));
}
