#pragma once

#include <cstdint>
#include <vector>

#include "gcnet/bootstrap.hpp"
#include "gcnet/clime.hpp"
#include "gcnet/dgp.hpp"
#include "gcnet/debias.hpp"
#include "gcnet/lasso.hpp"
#include "gcnet/multiple_testing.hpp"

namespace gcnet {

struct DirectionalScore {
  double dfdp = 0.0;   // sign-mismatched rejections / (rejections v 1)
  double dpower = 0.0; // correctly signed true discoveries / |S|; 1 when |S| = 0
  int n_rejected = 0;
  int n_sign_errors = 0;
};

enum class STildeChoice { LassoSupport, AsymptoticDiscoveries };

// Scores a discovery set against the true coefficients; a rejection of a true
// zero always counts as a sign error (sgn 0 never matches +-1).
DirectionalScore score(const DiscoverySet& discoveries, const CoefficientMatrix& truth);

struct McConfig {
  int n = 50;
  int t = 200;
  int k = 1;
  int m = 2;
  double rho = 0.4;
  double spectral_cap = 0.96;
  double q = 0.1;
  double a = 3.1;
  ErrorDistribution error_dist = ErrorDistribution::StandardNormal;
  MixtureParams mixture;
  SigmaUKind sigma_u_kind = SigmaUKind::Diagonal;
  int n_reps = 200;
  int b_draws = 100;
  MultiplierKind multiplier = MultiplierKind::Rademacher;
  std::vector<SeVariant> variants = {SeVariant::Sandwich};
  std::vector<Procedure> procedures = {Procedure::Asymptotic, Procedure::Bootstrap};
  std::uint64_t seed = 1;
  bool redraw_design = true;  // fresh Phi and Sigma_u each replication
  int burn_in = kDefaultBurnIn;
  LambdaStrategy lambda_strategy = LambdaStrategy::cross_validation(10, /*per_row=*/true);
  Lambda1Strategy lambda1_strategy;
  double ridge_epsilon = 0.0;
  DofRule dof_rule = DofRule::ActiveSetSize;
  STildeChoice s_tilde = STildeChoice::AsymptoticDiscoveries;
  FitOptions fit_options;
  int thread_budget = 0;  // 0: default_thread_budget()
  double max_failure_fraction = 0.02;

  void validate() const;
};

struct McCell {
  Procedure procedure = Procedure::Asymptotic;
  SeVariant variant = SeVariant::Sandwich;
  double dfdr = 0.0;
  double dfdr_se = 0.0;
  double dpower = 0.0;
  double dpower_se = 0.0;
  // One score per successful replication, in replication order.
  std::vector<DirectionalScore> per_rep;
};

struct McResult {
  std::vector<McCell> cells;
  std::vector<int> failed_reps;
  std::vector<std::string> failure_messages;
  double wall_seconds = 0.0;
};

// Full simulation harness: per replication draw the coefficients, simulate,
// fit, test with every requested (procedure, variant) pair, and score.
// Replications run in parallel on child streams indexed by replication, so
// results are a pure function of the config.
McResult run_monte_carlo(const McConfig& config);

struct StabilityConfig {
  int n = 20;
  int t = 100;
  int m = 2;
  double rho = 0.4;
  double spectral_cap = 0.96;
  double q = 0.2;
  double a = 3.1;
  int n_reps = 1000;
  std::uint64_t seed = 1;
  bool fixed_phi = true;  // one coefficient draw shared by all replications
  int burn_in = kDefaultBurnIn;
  LambdaStrategy lambda_strategy = LambdaStrategy::cross_validation(10, /*per_row=*/true);
  Lambda1Strategy lambda1_strategy;
  DofRule dof_rule = DofRule::ActiveSetSize;
  FitOptions fit_options;
  int thread_budget = 0;
};

struct StabilityResult {
  Eigen::MatrixXd lasso_frequency;  // selection frequency of each cell by lasso
  Eigen::MatrixXd test_frequency;   // selection frequency by Procedure 1
  CoefficientMatrix phi;            // truth of the first replication
};

// Selection-frequency experiment with identity error covariance: how often
// each coefficient cell is picked by the lasso support versus the
// FDR-controlled multiple test.
StabilityResult run_stability_experiment(const StabilityConfig& config);

}  // namespace gcnet
