#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "gcnet/discover.hpp"
#include "gcnet/parallel.hpp"

namespace {

using namespace gcnet;

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitConfig = 2;

void print_error_json(const std::string& type, const std::string& what) {
  std::cerr << "{\"error\": {\"type\": \"" << type << "\", \"message\": \"";
  for (char c : what) {
    if (c == '"' || c == '\\') std::cerr << '\\';
    if (c == '\n') {
      std::cerr << "\\n";
      continue;
    }
    std::cerr << c;
  }
  std::cerr << "\"}}\n";
}

const std::map<std::string, SeVariant> kVariantMap{{"sandwich", SeVariant::Sandwich},
                                                   {"diag_only", SeVariant::DiagOnly}};
const std::map<std::string, Procedure> kProcMap{{"asymptotic", Procedure::Asymptotic},
                                                {"bootstrap", Procedure::Bootstrap}};
const std::map<std::string, MultiplierKind> kMultiplierMap{
    {"rademacher", MultiplierKind::Rademacher}, {"mammen", MultiplierKind::Mammen}};
const std::map<std::string, DofRule> kDofMap{{"active_set_size", DofRule::ActiveSetSize},
                                             {"zero", DofRule::Zero},
                                             {"fixed", DofRule::Fixed}};
const std::map<std::string, ProcedureChoice> kProcedureMap{
    {"asymptotic", ProcedureChoice::Asymptotic},
    {"bootstrap", ProcedureChoice::Bootstrap},
    {"both", ProcedureChoice::Both}};
const std::map<std::string, STildeRule> kSTildeMap{{"lasso", STildeRule::LassoSupport},
                                                   {"asymptotic_discoveries", STildeRule::AsymptoticDiscoveries}};
const std::map<std::string, ErrorDistribution> kErrorMap{
    {"normal", ErrorDistribution::StandardNormal}, {"mixture", ErrorDistribution::MixtureNormal}};
const std::map<std::string, SigmaUKind> kSigmaUMap{{"diagonal", SigmaUKind::Diagonal},
                                                   {"banded", SigmaUKind::Banded}};

struct LambdaCli {
  std::string kind = "cv";
  int n_folds = 10;
  bool per_row = true;
  double nu = 1.0, b_hat = 1.0, c_uu_hat = 1.0;
  std::vector<double> grid;

  LambdaStrategy resolve() const {
    if (kind == "theory") return LambdaStrategy::theory(nu, b_hat, c_uu_hat);
    if (kind == "fixed") return LambdaStrategy::fixed_grid(grid);
    return LambdaStrategy::cross_validation(n_folds, per_row);
  }
};

struct Lambda1Cli {
  std::string kind = "rate";
  double value = 0.05;
  double c0 = 0.2;

  Lambda1Strategy resolve() const {
    if (kind == "fixed") return Lambda1Strategy::fixed(value);
    if (kind == "constraint_path") return Lambda1Strategy::constraint_path();
    return Lambda1Strategy::rate_default(c0);
  }
};

void add_lambda_options(CLI::App* cmd, LambdaCli& lambda, Lambda1Cli& lambda1) {
  cmd->add_option("--lambda_strategy", lambda.kind, "Lasso lambda rule: cv, theory, fixed")
      ->check(CLI::IsMember({"cv", "theory", "fixed"}));
  cmd->add_option("--lambda_folds", lambda.n_folds, "CV folds");
  cmd->add_flag("--lambda_per_row,!--lambda_shared", lambda.per_row,
                "Per-row lambda (default) or one shared value");
  cmd->add_option("--lambda_nu", lambda.nu, "Theory rule constant nu");
  cmd->add_option("--lambda_b", lambda.b_hat, "Theory rule constant b");
  cmd->add_option("--lambda_c_uu", lambda.c_uu_hat, "Theory rule constant c_uu");
  cmd->add_option("--lambda_grid", lambda.grid, "Fixed lambda grid values");
  cmd->add_option("--lambda1_strategy", lambda1.kind,
                  "CLIME lambda1 rule: rate, constraint_path, fixed")
      ->check(CLI::IsMember({"rate", "constraint_path", "fixed"}));
  cmd->add_option("--lambda1_value", lambda1.value, "Fixed lambda1 value");
  cmd->add_option("--lambda1_c0", lambda1.c0, "Rate rule scale c0");
}

void add_simulate_options(CLI::App* cmd, SimulateSpec& sim) {
  cmd->add_option("--sim_n", sim.n, "Simulated series count N");
  cmd->add_option("--sim_t", sim.t, "Simulated sample size T");
  cmd->add_option("--sim_m", sim.m, "Band half-width m of the coefficient design");
  cmd->add_option("--sim_rho", sim.rho, "Band decay rho (0 gives a zero coefficient matrix)");
  cmd->add_option("--sim_error_dist", sim.error_dist, "Innovations: normal, mixture")
      ->transform(CLI::CheckedTransformer(kErrorMap, CLI::ignore_case));
  cmd->add_option("--sim_sigma_u", sim.sigma_u_kind, "Error covariance: diagonal, banded")
      ->transform(CLI::CheckedTransformer(kSigmaUMap, CLI::ignore_case));
  cmd->add_option("--sim_burn_in", sim.burn_in, "Burn-in length");
}

int run_discover_cmd(const RunConfig& config, const std::string& out_dir) {
  const DiscoverReport report = run_discover(config);
  for (const std::string& path : write_discover_artifacts(report, out_dir))
    std::cout << "wrote " << path << "\n";
  for (const ProcedureOutput& out : report.outputs) {
    std::printf("%-10s t0=%.4f (%s, cap %.4f)  rejected=%zu  edges=%zu\n",
                out.procedure == Procedure::Asymptotic ? "asymptotic" : "bootstrap",
                out.threshold.t0,
                out.threshold.rule == ThresholdRule::FdrSearch ? "fdr_search" : "fwer_fallback",
                out.threshold.search_cap, out.discovery_set.rejected.size(), out.edges.size());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Granger-causal network discovery under directional FDR control"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key=value file (sections per subcommand)");

  // discover
  RunConfig run;
  LambdaCli run_lambda;
  Lambda1Cli run_lambda1;
  std::string out_dir = ".";
  bool no_header = false, demean = false, standardize = false;
  std::string delimiter = ",";
  auto* discover = app.add_subcommand("discover", "Estimate the network from a CSV or simulation");
  discover->option_defaults()->always_capture_default(true);
  discover->add_option("--input", run.input_path, "CSV with rows = time, columns = series");
  discover->add_flag("--simulate", run.simulate, "Generate data from the simulation design");
  add_simulate_options(discover, run.sim);
  discover->add_option("--lag_order,-K", run.lag_order, "VAR order K");
  discover->add_option("--q", run.q, "Target directional FDR level");
  discover->add_option("--procedure", run.procedure, "asymptotic, bootstrap, both")
      ->transform(CLI::CheckedTransformer(kProcedureMap, CLI::ignore_case));
  discover->add_option("--se_variant", run.variant, "Standard error: sandwich, diag_only")
      ->transform(CLI::CheckedTransformer(kVariantMap, CLI::ignore_case));
  discover->add_option("--a", run.a, "Search cap constant a (> 3)");
  discover->add_option("--b_draws,-B", run.b_draws, "Bootstrap draws");
  discover->add_option("--multiplier", run.multiplier, "Multiplier law: rademacher, mammen")
      ->transform(CLI::CheckedTransformer(kMultiplierMap, CLI::ignore_case));
  add_lambda_options(discover, run_lambda, run_lambda1);
  discover->add_option("--ridge_epsilon", run.ridge_epsilon, "Ridge offset for CLIME");
  discover->add_option("--dof_rule", run.dof_rule, "sigma_i^2 divisor rule")
      ->transform(CLI::CheckedTransformer(kDofMap, CLI::ignore_case));
  discover->add_option("--fixed_d", run.fixed_d, "d_i when dof_rule = fixed");
  discover->add_option("--s_tilde_rule", run.s_tilde_rule,
                       "Bootstrap null exclusion set: lasso, asymptotic_discoveries")
      ->transform(CLI::CheckedTransformer(kSTildeMap, CLI::ignore_case));
  discover->add_flag("--include_self_lags", run.include_self_lags,
                     "Keep self-lag edges in exports");
  discover->add_option("--seed", run.seed, "Root seed");
  discover->add_option("--output_prefix", run.output_prefix, "Artifact file prefix");
  discover->add_option("--out_dir", out_dir, "Artifact directory");
  discover->add_option("--dump_null", run.null_dump_path,
                       "Write the pooled bootstrap null values to this CSV");
  discover->add_option("--thread_budget,-j", run.thread_budget,
                       "Worker cap (0: GCNET_THREADS or hardware)");
  discover->add_flag("--no_header", no_header, "CSV has no header row");
  discover->add_flag("--demean", demean, "Subtract column means");
  discover->add_flag("--standardize", standardize, "Demean and scale to unit variance");
  discover->add_option("--delimiter", delimiter, "CSV delimiter");

  // montecarlo
  McConfig mc;
  LambdaCli mc_lambda;
  Lambda1Cli mc_lambda1;
  std::string mc_out = "mc_results.csv";
  std::vector<std::string> mc_variants{"sandwich"};
  std::vector<std::string> mc_procedures{"asymptotic", "bootstrap"};
  bool dry_run = false;
  auto* montecarlo = app.add_subcommand("montecarlo", "Simulation study of both procedures");
  montecarlo->option_defaults()->always_capture_default(true);
  montecarlo->add_option("--n", mc.n, "Series count N");
  montecarlo->add_option("--t", mc.t, "Sample size T");
  montecarlo->add_option("--m", mc.m, "Band half-width m");
  montecarlo->add_option("--rho", mc.rho, "Band decay rho");
  montecarlo->add_option("--q", mc.q, "Target directional FDR level");
  montecarlo->add_option("--a", mc.a, "Search cap constant a");
  montecarlo->add_option("--error_dist", mc.error_dist, "normal, mixture")
      ->transform(CLI::CheckedTransformer(kErrorMap, CLI::ignore_case));
  montecarlo->add_option("--sigma_u", mc.sigma_u_kind, "diagonal, banded")
      ->transform(CLI::CheckedTransformer(kSigmaUMap, CLI::ignore_case));
  montecarlo->add_option("--n_reps", mc.n_reps, "Replications");
  montecarlo->add_option("--b_draws,-B", mc.b_draws, "Bootstrap draws");
  montecarlo->add_option("--multiplier", mc.multiplier, "rademacher, mammen")
      ->transform(CLI::CheckedTransformer(kMultiplierMap, CLI::ignore_case));
  montecarlo->add_option("--se_variants", mc_variants, "sandwich and/or diag_only");
  montecarlo->add_option("--procedures", mc_procedures, "asymptotic and/or bootstrap");
  montecarlo->add_option("--seed", mc.seed, "Root seed");
  montecarlo->add_flag("--redraw_design,!--fixed_design", mc.redraw_design,
                       "Fresh coefficient draw per replication (default) or one shared draw");
  add_lambda_options(montecarlo, mc_lambda, mc_lambda1);
  montecarlo->add_option("--dof_rule", mc.dof_rule, "sigma_i^2 divisor rule")
      ->transform(CLI::CheckedTransformer(kDofMap, CLI::ignore_case));
  const std::map<std::string, STildeChoice> kSTildeChoiceMap{
      {"lasso", STildeChoice::LassoSupport}, {"asymptotic_discoveries", STildeChoice::AsymptoticDiscoveries}};
  montecarlo->add_option("--s_tilde_rule", mc.s_tilde,
                         "Bootstrap null exclusion set: lasso, asymptotic_discoveries")
      ->transform(CLI::CheckedTransformer(kSTildeChoiceMap, CLI::ignore_case));
  montecarlo->add_option("--thread_budget,-j", mc.thread_budget, "Worker cap");
  montecarlo->add_option("--out", mc_out, "Results CSV path");
  montecarlo->add_flag("--dry-run", dry_run, "Print the resolved config and exit");

  // simulate
  SimulateSpec sim;
  std::string sim_out = "panel.csv";
  std::string truth_out;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Write a simulated panel to CSV");
  add_simulate_options(simulate, sim);
  simulate->add_option("--seed", sim_seed, "Root seed");
  simulate->add_option("--out", sim_out, "Output CSV path");
  simulate->add_option("--truth_out", truth_out, "Optional CSV of the true coefficients");

  // export
  std::string edges_in, dot_out = "graph.dot", groups_path;
  bool drop_self_lags = false;
  auto* export_cmd = app.add_subcommand("export", "Re-export an edge-list CSV as DOT");
  export_cmd->add_option("--edges", edges_in, "Edge-list CSV produced by discover")->required();
  export_cmd->add_option("--out", dot_out, "DOT output path");
  export_cmd->add_option("--groups", groups_path, "CSV with one group id per series");
  export_cmd->add_flag("--drop_self_lags", drop_self_lags, "Remove source == target edges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*discover) {
      run.lambda_strategy = run_lambda.resolve();
      run.lambda1_strategy = run_lambda1.resolve();
      run.csv.header = !no_header;
      run.csv.demean = demean;
      run.csv.standardize = standardize;
      if (delimiter.size() != 1) throw InvalidArgument("delimiter must be one character");
      run.csv.delimiter = delimiter[0];
      run.validate();
      const int status = run_discover_cmd(run, out_dir);
      if (status == kExitOk) {
        const std::string ini_path = out_dir + "/" + run.output_prefix + "_config.ini";
        write_text_file(ini_path, app.config_to_str(false, false));
        std::cout << "wrote " << ini_path << "\n";
      }
      return status;
    }
    if (*montecarlo) {
      mc.lambda_strategy = mc_lambda.resolve();
      mc.lambda1_strategy = mc_lambda1.resolve();
      mc.variants.clear();
      for (const std::string& v : mc_variants) mc.variants.push_back(kVariantMap.at(v));
      mc.procedures.clear();
      for (const std::string& p : mc_procedures) mc.procedures.push_back(kProcMap.at(p));
      mc.validate();
      if (dry_run) {
        std::cout << mc_config_to_json(mc);
        return kExitOk;
      }
      const McResult result = run_monte_carlo(mc);
      const std::string csv = mc_results_csv(mc, result);
      write_text_file(mc_out, csv);
      std::cout << csv << "wrote " << mc_out << "\n";
      return kExitOk;
    }
    if (*simulate) {
      RngStream root(sim_seed);
      RngStream phi_stream = root.child(0);
      RngStream sigma_stream = root.child(1);
      RngStream sim_stream = root.child(2);
      const CoefficientMatrix phi =
          build_coefficient_matrix(sim.n, sim.m, sim.rho, sim.spectral_cap, phi_stream);
      ErrorSpec spec = build_sigma_u(sim.n, sim.sigma_u_kind, sigma_stream);
      spec.distribution = sim.error_dist;
      spec.mixture = sim.mixture;
      const PanelData panel = simulate_var(phi, spec, sim.t, sim.burn_in, sim_stream);
      // Rows = time: K initial-condition rows from the first design column,
      // then the T observations. Re-ingesting with the same K reproduces the
      // panel exactly.
      const int k = panel.dims.lag_order;
      Eigen::MatrixXd table(sim.t + k, sim.n);
      for (int lag = 1; lag <= k; ++lag)
        table.row(k - lag) = panel.design.block((lag - 1) * sim.n, 0, sim.n, 1).transpose();
      table.bottomRows(sim.t) = panel.observations.transpose();
      write_table_csv(sim_out, table, default_series_names(sim.n));
      std::cout << "wrote " << sim_out << "\n";
      if (!truth_out.empty()) {
        write_table_csv(truth_out, phi.values, default_series_names(sim.n));
        std::cout << "wrote " << truth_out << "\n";
      }
      return kExitOk;
    }
    if (*export_cmd) {
      std::vector<std::string> names;
      std::vector<EdgeRecord> edges = read_edge_csv(edges_in, &names);
      if (drop_self_lags)
        std::erase_if(edges, [](const EdgeRecord& e) { return e.source == e.target; });
      std::vector<int> groups;
      if (!groups_path.empty()) {
        CsvOptions opt;
        opt.header = false;
        const Eigen::MatrixXd table = read_table_csv(groups_path, opt, nullptr);
        for (Eigen::Index r = 0; r < table.rows(); ++r)
          groups.push_back(static_cast<int>(table(r, table.cols() - 1)));
      }
      write_text_file(dot_out, export_dot(edges, names, groups));
      std::cout << "wrote " << dot_out << "\n";
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    print_error_json("invalid_argument", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    print_error_json("compute", e.what());
    return kExitCompute;
  } catch (const std::exception& e) {
    print_error_json("internal", e.what());
    return kExitCompute;
  }
  return kExitConfig;
}
