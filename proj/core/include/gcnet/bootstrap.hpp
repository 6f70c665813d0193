#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "gcnet/debias.hpp"
#include "gcnet/lasso.hpp"
#include "gcnet/multiple_testing.hpp"
#include "gcnet/rng.hpp"

namespace gcnet {

enum class MultiplierKind { Rademacher, Mammen };

// i.i.d. mean-zero unit-variance multipliers; one scalar per time point.
Eigen::VectorXd sample_multipliers(MultiplierKind kind, int t, RngStream& rng);

// Pooled fixed-design wild bootstrap null distribution on s_tilde^c n H.
struct BootstrapNull {
  std::vector<double> sorted_t_values;  // ascending, size b_used * |null_set|
  int b_draws = 0;                      // requested B
  int skipped_draws = 0;                // non-convergent draws dropped
  std::vector<std::pair<int, int>> null_set;
  SeVariant variant = SeVariant::Sandwich;
};

struct BootstrapOptions {
  int b_draws = 100;
  MultiplierKind multiplier = MultiplierKind::Rademacher;
  double max_skip_fraction = 0.05;
  FitOptions fit_options;
  // Test hook: replaces the multiplier law when set (e.g. zeta == 1).
  std::function<Eigen::VectorXd(int, RngStream&)> multiplier_fn;
};

// Procedure 2 steps (a)-(f) repeated B times: u*_t = u_hat_t zeta_t with one
// scalar per time point, y*_t = Phi_L x_t + u*_t against the original fixed
// design, lasso refit at the original per-row lambda from a cold start, debias
// with the original precision estimate, and t-statistics with
// sigma*_i^2 = ||u*_i - (Phi_L* - Phi_L) X||^2 / (T - s_hat_i).
// Draw b uses child stream (root, b), so extending B keeps earlier draws.
std::vector<BootstrapNull> bootstrap_null_multi(
    const PanelData& data, const LassoFit& fit, const PrecisionEstimate& precision,
    const SparsityPattern& s_tilde, const HypothesisSet& hypotheses,
    const BootstrapOptions& options, const std::vector<SeVariant>& variants, RngStream root,
    int thread_budget = 1);

BootstrapNull bootstrap_null(const PanelData& data, const LassoFit& fit,
                             const PrecisionEstimate& precision, const SparsityPattern& s_tilde,
                             const HypothesisSet& hypotheses, const BootstrapOptions& options,
                             SeVariant variant, RngStream root, int thread_budget = 1);

// Fraction of pooled values strictly greater than t.
double bootstrap_cdf(const BootstrapNull& null, double t);

// Procedure 2 step 3: smallest candidate t in [0, t_bar] with
// |H| {Q*(t) + 1 - Q*(-t)} / (|S(t)| v 1) <= q, scanning the pooled bootstrap
// values and the observed |T| values; fallback rule as in Procedure 1.
ThresholdResult bootstrap_threshold(const TestField& field, const BootstrapNull& null, double q,
                                    double a = 3.1);

}  // namespace gcnet
