#pragma once

#include <map>
#include <string>
#include <vector>

#include "gcnet/evaluation.hpp"
#include "gcnet/io.hpp"

namespace gcnet {

enum class ProcedureChoice { Asymptotic, Bootstrap, Both };
enum class STildeRule { LassoSupport, AsymptoticDiscoveries };

struct SimulateSpec {
  int n = 20;
  int t = 200;
  int k = 1;
  int m = 2;
  double rho = 0.4;
  double spectral_cap = 0.96;
  ErrorDistribution error_dist = ErrorDistribution::StandardNormal;
  MixtureParams mixture;
  SigmaUKind sigma_u_kind = SigmaUKind::Diagonal;
  int burn_in = kDefaultBurnIn;
};

// Resolved configuration of one discovery run; echoed verbatim into every
// output artifact.
struct RunConfig {
  std::string input_path;  // empty: simulate instead of ingest
  bool simulate = false;
  SimulateSpec sim;
  CsvOptions csv;
  int lag_order = 1;
  double q = 0.1;
  ProcedureChoice procedure = ProcedureChoice::Both;
  SeVariant variant = SeVariant::Sandwich;
  double a = 3.1;
  int b_draws = 100;
  MultiplierKind multiplier = MultiplierKind::Rademacher;
  LambdaStrategy lambda_strategy = LambdaStrategy::cross_validation(10, /*per_row=*/true);
  Lambda1Strategy lambda1_strategy;
  double ridge_epsilon = 0.0;
  DofRule dof_rule = DofRule::ActiveSetSize;
  int fixed_d = 0;
  STildeRule s_tilde_rule = STildeRule::AsymptoticDiscoveries;
  bool include_self_lags = false;
  std::uint64_t seed = 1;
  std::string output_prefix = "gcnet";
  std::string null_dump_path;  // optional audit dump of the pooled bootstrap null
  int thread_budget = 0;
  FitOptions fit_options;

  void validate() const;
};

struct ProcedureOutput {
  Procedure procedure = Procedure::Asymptotic;
  ThresholdResult threshold;
  DiscoverySet discovery_set;
  std::vector<EdgeRecord> edges;
};

struct DiscoverReport {
  RunConfig config;
  std::vector<std::string> names;
  VarDims dims;
  Eigen::VectorXd lambda_per_row;
  bool lambda_shared = true;
  double lambda1 = 0.0;
  double lasso_kkt_violation = 0.0;
  double clime_constraint_violation = 0.0;
  int lasso_active_total = 0;
  std::vector<ProcedureOutput> outputs;
  std::map<std::string, double> stage_seconds;
  double total_seconds = 0.0;
};

// Runs the full pipeline: ingest or simulate, lasso, CLIME, debias, then the
// requested threshold procedure(s).
DiscoverReport run_discover(const RunConfig& config);

// JSON run report; timings can be omitted for byte-identical reruns.
std::string report_to_json(const DiscoverReport& report, bool include_timings = true);

// Writes <prefix>_edges_<procedure>.csv, <prefix>_graph_<procedure>.dot and
// <prefix>_report.json; returns the written paths.
std::vector<std::string> write_discover_artifacts(const DiscoverReport& report,
                                                  const std::string& directory);

// One row per (procedure, variant) cell matching the simulation tables:
// dFDR and power in percent with Monte Carlo standard errors.
std::string mc_results_csv(const McConfig& config, const McResult& result);

std::string mc_config_to_json(const McConfig& config);
std::string run_config_to_json(const RunConfig& config);

}  // namespace gcnet
