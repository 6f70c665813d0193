#include "gcnet/discover.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>

#include "gcnet/parallel.hpp"

namespace gcnet {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const char* to_tag(Procedure p) { return p == Procedure::Asymptotic ? "asymptotic" : "bootstrap"; }
const char* to_tag(SeVariant v) { return v == SeVariant::Sandwich ? "sandwich" : "diag_only"; }
const char* to_tag(ThresholdRule r) {
  return r == ThresholdRule::FdrSearch ? "fdr_search" : "fwer_fallback";
}
const char* to_tag(MultiplierKind m) {
  return m == MultiplierKind::Rademacher ? "rademacher" : "mammen";
}
const char* to_tag(DofRule d) {
  switch (d) {
    case DofRule::ActiveSetSize: return "active_set_size";
    case DofRule::Zero: return "zero";
    case DofRule::Fixed: return "fixed";
  }
  return "?";
}
const char* to_tag(ProcedureChoice p) {
  switch (p) {
    case ProcedureChoice::Asymptotic: return "asymptotic";
    case ProcedureChoice::Bootstrap: return "bootstrap";
    case ProcedureChoice::Both: return "both";
  }
  return "?";
}
const char* to_tag(STildeRule s) {
  return s == STildeRule::LassoSupport ? "lasso" : "asymptotic_discoveries";
}
const char* to_tag(ErrorDistribution d) {
  return d == ErrorDistribution::StandardNormal ? "normal" : "mixture";
}
const char* to_tag(SigmaUKind k) { return k == SigmaUKind::Diagonal ? "diagonal" : "banded"; }

json lambda_strategy_json(const LambdaStrategy& s) {
  json j;
  switch (s.kind) {
    case LambdaStrategy::Kind::Theory:
      j["kind"] = "theory";
      j["nu"] = s.nu;
      j["b_hat"] = s.b_hat;
      j["c_uu_hat"] = s.c_uu_hat;
      break;
    case LambdaStrategy::Kind::CrossValidation:
      j["kind"] = "cv";
      j["n_folds"] = s.n_folds;
      j["per_row"] = s.per_row;
      j["grid_size"] = s.grid_size;
      j["grid_decades"] = s.grid_decades;
      break;
    case LambdaStrategy::Kind::FixedGrid:
      j["kind"] = "fixed";
      j["grid"] = s.grid;
      break;
  }
  return j;
}

json lambda1_strategy_json(const Lambda1Strategy& s) {
  json j;
  if (s.kind == Lambda1Strategy::Kind::RateDefault) {
    j["kind"] = "rate_default";
    j["c0"] = s.rate_c0;
  } else if (s.kind == Lambda1Strategy::Kind::Fixed) {
    j["kind"] = "fixed";
    j["value"] = s.value;
  } else {
    j["kind"] = "constraint_path";
    j["path_base"] = s.path_base;
    j["path_max_doublings"] = s.path_max_doublings;
    if (!s.grid.empty()) j["grid"] = s.grid;
  }
  return j;
}

json simulate_spec_json(const SimulateSpec& s) {
  json j;
  j["n"] = s.n;
  j["t"] = s.t;
  j["k"] = s.k;
  j["m"] = s.m;
  j["rho"] = s.rho;
  j["spectral_cap"] = s.spectral_cap;
  j["error_dist"] = to_tag(s.error_dist);
  j["sigma_u"] = to_tag(s.sigma_u_kind);
  j["burn_in"] = s.burn_in;
  if (s.error_dist == ErrorDistribution::MixtureNormal) {
    j["mixture"] = {{"pi", s.mixture.pi},
                    {"mu_xi", s.mixture.mu_xi},
                    {"sigma_xi", s.mixture.sigma_xi},
                    {"mu_zeta", s.mixture.mu_zeta},
                    {"sigma_zeta", s.mixture.sigma_zeta}};
  }
  return j;
}

json run_config_json(const RunConfig& c) {
  json j;
  j["input_path"] = c.input_path;
  j["simulate"] = c.simulate;
  if (c.simulate) j["sim"] = simulate_spec_json(c.sim);
  j["csv"] = {{"header", c.csv.header},
              {"delimiter", std::string(1, c.csv.delimiter)},
              {"demean", c.csv.demean},
              {"standardize", c.csv.standardize}};
  j["lag_order"] = c.lag_order;
  j["q"] = c.q;
  j["procedure"] = to_tag(c.procedure);
  j["se_variant"] = to_tag(c.variant);
  j["a"] = c.a;
  j["b_draws"] = c.b_draws;
  j["multiplier"] = to_tag(c.multiplier);
  j["lambda"] = lambda_strategy_json(c.lambda_strategy);
  j["lambda1"] = lambda1_strategy_json(c.lambda1_strategy);
  j["ridge_epsilon"] = c.ridge_epsilon;
  j["dof_rule"] = to_tag(c.dof_rule);
  j["fixed_d"] = c.fixed_d;
  j["s_tilde_rule"] = to_tag(c.s_tilde_rule);
  j["include_self_lags"] = c.include_self_lags;
  j["seed"] = c.seed;
  j["output_prefix"] = c.output_prefix;
  j["thread_budget"] = c.thread_budget;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (!simulate && input_path.empty())
    throw InvalidArgument("RunConfig: either an input path or simulate mode is required");
  if (lag_order < 1) throw InvalidArgument("RunConfig: lag_order must be >= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("RunConfig: q must be in [0,1]");
  if (!(a > 3.0)) throw InvalidArgument("RunConfig: a must be > 3");
  if (b_draws < 1) throw InvalidArgument("RunConfig: b_draws must be >= 1");
  if (output_prefix.empty()) throw InvalidArgument("RunConfig: output_prefix must be non-empty");
}

DiscoverReport run_discover(const RunConfig& config) {
  config.validate();
  const auto start_total = Clock::now();
  const int budget = config.thread_budget > 0 ? config.thread_budget : default_thread_budget();

  DiscoverReport report;
  report.config = config;

  auto start = Clock::now();
  PanelData panel;
  if (config.simulate) {
    const SimulateSpec& s = config.sim;
    RngStream root(config.seed);
    RngStream phi_stream = root.child(0);
    RngStream sigma_stream = root.child(1);
    RngStream sim_stream = root.child(2);
    CoefficientMatrix phi =
        build_coefficient_matrix(s.n, s.m, s.rho, s.spectral_cap, phi_stream);
    if (s.k != 1)
      throw InvalidArgument("run_discover: the simulation design is VAR(1); set sim.k = 1");
    ErrorSpec spec = build_sigma_u(s.n, s.sigma_u_kind, sigma_stream);
    spec.distribution = s.error_dist;
    spec.mixture = s.mixture;
    panel = simulate_var(phi, spec, s.t, s.burn_in, sim_stream);
    report.names = default_series_names(s.n);
  } else {
    IngestResult ingest = ingest_csv(config.input_path, config.lag_order, config.csv);
    panel = std::move(ingest.data);
    report.names = std::move(ingest.names);
  }
  report.dims = panel.dims;
  report.stage_seconds["ingest"] = seconds_since(start);

  start = Clock::now();
  RngStream lambda_stream = RngStream(config.seed).child(3);
  const LambdaSelection lambda =
      select_lambda(panel, config.lambda_strategy, lambda_stream, config.fit_options, budget);
  report.lambda_per_row = lambda.per_row;
  report.lambda_shared = lambda.shared;
  report.stage_seconds["select_lambda"] = seconds_since(start);

  start = Clock::now();
  const LassoFit fit = fit_all(panel, lambda.per_row, config.fit_options, budget);
  const ResidualVariances variances = residual_variance(fit, config.dof_rule, config.fixed_d);
  report.lasso_kkt_violation = fit.kkt_violation;
  report.lasso_active_total = static_cast<int>(fit.active_sets.support.size());
  report.stage_seconds["lasso"] = seconds_since(start);

  start = Clock::now();
  const Eigen::MatrixXd sigma_x = sample_covariance(panel);
  const PrecisionEstimate precision = estimate_precision(
      sigma_x, config.lambda1_strategy, config.ridge_epsilon, budget, panel.dims.n_obs);
  report.lambda1 = precision.lambda1;
  report.clime_constraint_violation = precision.constraint_violation;
  report.stage_seconds["clime"] = seconds_since(start);

  start = Clock::now();
  const DebiasedEstimate estimate = debias(fit, panel, precision);
  const HypothesisSet hypotheses = HypothesisSet::full(panel.dims.n_series, panel.dims.stacked());
  const TestField field = t_field(estimate, variances, precision, sigma_x, panel.dims.n_obs,
                                  config.variant, hypotheses);
  report.stage_seconds["debias"] = seconds_since(start);

  const bool want_asymptotic = config.procedure != ProcedureChoice::Bootstrap;
  const bool want_bootstrap = config.procedure != ProcedureChoice::Asymptotic;
  const bool need_asymptotic =
      want_asymptotic ||
      (want_bootstrap && config.s_tilde_rule == STildeRule::AsymptoticDiscoveries);

  start = Clock::now();
  ThresholdResult asymptotic;
  DiscoverySet asymptotic_set;
  if (need_asymptotic) {
    asymptotic = asymptotic_threshold(field, config.q, config.a);
    asymptotic_set = discoveries(field, estimate, asymptotic, Procedure::Asymptotic);
  }
  if (want_asymptotic) {
    ProcedureOutput out;
    out.procedure = Procedure::Asymptotic;
    out.threshold = asymptotic;
    out.discovery_set = asymptotic_set;
    out.edges = export_network(asymptotic_set, panel.dims, config.include_self_lags);
    report.outputs.push_back(std::move(out));
  }
  report.stage_seconds["threshold_asymptotic"] = seconds_since(start);

  if (want_bootstrap) {
    start = Clock::now();
    SparsityPattern s_tilde = fit.active_sets;
    if (config.s_tilde_rule == STildeRule::AsymptoticDiscoveries) {
      Eigen::MatrixXd indicator =
          Eigen::MatrixXd::Zero(panel.dims.n_series, panel.dims.stacked());
      for (const Discovery& d : asymptotic_set.rejected) indicator(d.row, d.col) = 1.0;
      s_tilde = SparsityPattern::from_matrix(indicator);
    }
    BootstrapOptions boot;
    boot.b_draws = config.b_draws;
    boot.multiplier = config.multiplier;
    boot.fit_options = config.fit_options;
    RngStream boot_stream = RngStream(config.seed).child(4);
    const BootstrapNull null = bootstrap_null(panel, fit, precision, s_tilde, hypotheses, boot,
                                              config.variant, boot_stream, budget);
    if (!config.null_dump_path.empty()) {
      std::string dump = "t_star\n";
      char buf[40];
      for (double v : null.sorted_t_values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        dump += buf;
      }
      write_text_file(config.null_dump_path, dump);
    }
    ProcedureOutput out;
    out.procedure = Procedure::Bootstrap;
    out.threshold = bootstrap_threshold(field, null, config.q, config.a);
    out.discovery_set = discoveries(field, estimate, out.threshold, Procedure::Bootstrap);
    out.edges = export_network(out.discovery_set, panel.dims, config.include_self_lags);
    report.outputs.push_back(std::move(out));
    report.stage_seconds["bootstrap"] = seconds_since(start);
  }

  report.total_seconds = seconds_since(start_total);
  return report;
}

std::string report_to_json(const DiscoverReport& report, bool include_timings) {
  json j;
  j["config"] = run_config_json(report.config);
  j["dims"] = {{"n_series", report.dims.n_series},
               {"lag_order", report.dims.lag_order},
               {"n_obs", report.dims.n_obs}};
  j["names"] = report.names;
  if (report.lambda_shared && report.lambda_per_row.size() > 0) {
    j["lambda"] = report.lambda_per_row[0];
  } else {
    j["lambda"] = std::vector<double>(report.lambda_per_row.data(),
                                      report.lambda_per_row.data() + report.lambda_per_row.size());
  }
  j["lambda1"] = report.lambda1;
  j["lasso_active_total"] = report.lasso_active_total;
  j["lasso_kkt_violation"] = report.lasso_kkt_violation;
  j["clime_constraint_violation"] = report.clime_constraint_violation;
  j["seed"] = report.config.seed;
  json outs = json::array();
  for (const ProcedureOutput& out : report.outputs) {
    json o;
    o["procedure"] = to_tag(out.procedure);
    o["t0"] = out.threshold.t0;
    o["search_cap"] = out.threshold.search_cap;
    o["rule"] = to_tag(out.threshold.rule);
    o["q"] = out.threshold.q_level;
    o["a"] = out.threshold.a_constant;
    o["n_rejected"] = out.discovery_set.rejected.size();
    o["n_edges"] = out.edges.size();
    outs.push_back(o);
  }
  j["procedures"] = outs;
  if (include_timings) {
    j["timings"] = report.stage_seconds;
    j["total_seconds"] = report.total_seconds;
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> write_discover_artifacts(const DiscoverReport& report,
                                                  const std::string& directory) {
  std::vector<std::string> written;
  const std::string base =
      directory.empty() ? report.config.output_prefix : directory + "/" + report.config.output_prefix;
  for (const ProcedureOutput& out : report.outputs) {
    const std::string tag = to_tag(out.procedure);
    const std::string edges_path = base + "_edges_" + tag + ".csv";
    write_edge_csv(edges_path, out.edges, report.names, out.threshold.t0, tag);
    written.push_back(edges_path);
    const std::string dot_path = base + "_graph_" + tag + ".dot";
    write_text_file(dot_path, export_dot(out.edges, report.names));
    written.push_back(dot_path);
  }
  const std::string report_path = base + "_report.json";
  write_text_file(report_path, report_to_json(report));
  written.push_back(report_path);
  return written;
}

std::string mc_config_to_json(const McConfig& c) {
  json j;
  j["n"] = c.n;
  j["t"] = c.t;
  j["k"] = c.k;
  j["m"] = c.m;
  j["rho"] = c.rho;
  j["spectral_cap"] = c.spectral_cap;
  j["q"] = c.q;
  j["a"] = c.a;
  j["error_dist"] = to_tag(c.error_dist);
  j["sigma_u"] = to_tag(c.sigma_u_kind);
  j["n_reps"] = c.n_reps;
  j["b_draws"] = c.b_draws;
  j["multiplier"] = to_tag(c.multiplier);
  json variants = json::array();
  for (SeVariant v : c.variants) variants.push_back(to_tag(v));
  j["se_variants"] = variants;
  json procedures = json::array();
  for (Procedure p : c.procedures) procedures.push_back(to_tag(p));
  j["procedures"] = procedures;
  j["seed"] = c.seed;
  j["redraw_design"] = c.redraw_design;
  j["burn_in"] = c.burn_in;
  j["lambda"] = lambda_strategy_json(c.lambda_strategy);
  j["lambda1"] = lambda1_strategy_json(c.lambda1_strategy);
  j["ridge_epsilon"] = c.ridge_epsilon;
  j["dof_rule"] = to_tag(c.dof_rule);
  j["thread_budget"] = c.thread_budget;
  return j.dump(2) + "\n";
}

std::string run_config_to_json(const RunConfig& config) {
  return run_config_json(config).dump(2) + "\n";
}

std::string mc_results_csv(const McConfig& config, const McResult& result) {
  std::string out =
      "n,t,k,m,rho,q,error_dist,sigma_u,n_reps,b_draws,procedure,se_variant,"
      "dfdr_pct,dfdr_se_pct,power_pct,power_se_pct,failed_reps,wall_seconds\n";
  char buf[256];
  for (const McCell& cell : result.cells) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%g,%g,%s,%s,%d,%d,%s,%s,%.2f,%.2f,%.2f,%.2f,%zu,%.1f\n",
                  config.n, config.t, config.k, config.m, config.rho, config.q,
                  to_tag(config.error_dist), to_tag(config.sigma_u_kind), config.n_reps,
                  config.b_draws, to_tag(cell.procedure), to_tag(cell.variant), 100.0 * cell.dfdr,
                  100.0 * cell.dfdr_se, 100.0 * cell.dpower, 100.0 * cell.dpower_se,
                  result.failed_reps.size(), result.wall_seconds);
    out += buf;
  }
  return out;
}

}  // namespace gcnet
