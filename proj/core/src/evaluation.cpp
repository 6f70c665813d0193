#include "gcnet/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "gcnet/parallel.hpp"

namespace gcnet {

DirectionalScore score(const DiscoverySet& discoveries, const CoefficientMatrix& truth) {
  DirectionalScore out;
  out.n_rejected = static_cast<int>(discoveries.rejected.size());
  int correct_true = 0;
  for (const Discovery& d : discoveries.rejected) {
    const double phi = truth.values(d.row, d.col);
    const int true_sign = phi > 0.0 ? 1 : (phi < 0.0 ? -1 : 0);
    if (d.sign != true_sign)
      ++out.n_sign_errors;
    else if (true_sign != 0)
      ++correct_true;
  }
  const int support = static_cast<int>((truth.values.array() != 0.0).count());
  out.dfdp = static_cast<double>(out.n_sign_errors) / std::max(out.n_rejected, 1);
  out.dpower = support == 0 ? 1.0 : static_cast<double>(correct_true) / support;
  return out;
}

void McConfig::validate() const {
  if (n < 1 || t < 1 || m < 0) throw InvalidArgument("McConfig: bad dimensions");
  if (k != 1) throw InvalidArgument("McConfig: the banded simulation design is VAR(1); k must be 1");
  if (!(std::abs(rho) < 1.0)) throw InvalidArgument("McConfig: |rho| must be < 1");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("McConfig: q must be in [0,1]");
  if (!(a > 3.0)) throw InvalidArgument("McConfig: a must be > 3");
  if (n_reps < 1) throw InvalidArgument("McConfig: n_reps must be >= 1");
  if (b_draws < 1) throw InvalidArgument("McConfig: b_draws must be >= 1");
  if (variants.empty()) throw InvalidArgument("McConfig: no standard-error variants");
  if (procedures.empty()) throw InvalidArgument("McConfig: no procedures");
  if (error_dist == ErrorDistribution::MixtureNormal) mixture.validate();
}

namespace {

struct RepOutcome {
  bool ok = false;
  std::string message;
  std::vector<DirectionalScore> scores;  // cell order
};

// Kahan-compensated mean and standard error over replications in index order.
void mean_and_se(const std::vector<double>& values, double& mean, double& se) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double r = static_cast<double>(values.size());
  mean = sum / r;
  double ss = 0.0, comp2 = 0.0;
  for (double v : values) {
    const double d = (v - mean) * (v - mean) - comp2;
    const double t = ss + d;
    comp2 = (t - ss) - d;
    ss = t;
  }
  se = r > 1.0 ? std::sqrt(ss / (r - 1.0) / r) : 0.0;
}

}  // namespace

McResult run_monte_carlo(const McConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int budget = config.thread_budget > 0 ? config.thread_budget : default_thread_budget();
  const RngStream root(config.seed);

  const bool need_bootstrap =
      std::find(config.procedures.begin(), config.procedures.end(), Procedure::Bootstrap) !=
      config.procedures.end();

  // Shared draws when the design is fixed across replications.
  CoefficientMatrix shared_phi;
  ErrorSpec shared_sigma;
  if (!config.redraw_design) {
    RngStream design_stream = root.child(0x5e11ed);
    RngStream phi_stream = design_stream.child(0);
    RngStream sig_stream = design_stream.child(1);
    shared_phi = build_coefficient_matrix(config.n, config.m, config.rho, config.spectral_cap,
                                          phi_stream);
    shared_sigma = build_sigma_u(config.n, config.sigma_u_kind, sig_stream);
  }

  const std::size_t n_cells = config.procedures.size() * config.variants.size();
  std::vector<RepOutcome> outcomes(config.n_reps);

  parallel_for(config.n_reps, budget, [&](std::size_t rep) {
    RepOutcome& outcome = outcomes[rep];
    try {
      RngStream stream = root.child(rep);
      RngStream phi_stream = stream.child(0);
      RngStream sigma_stream = stream.child(1);
      RngStream sim_stream = stream.child(2);
      RngStream lambda_stream = stream.child(3);
      RngStream boot_stream = stream.child(4);

      CoefficientMatrix phi =
          config.redraw_design
              ? build_coefficient_matrix(config.n, config.m, config.rho, config.spectral_cap,
                                         phi_stream)
              : shared_phi;
      ErrorSpec spec = config.redraw_design
                           ? build_sigma_u(config.n, config.sigma_u_kind, sigma_stream)
                           : shared_sigma;
      spec.distribution = config.error_dist;
      spec.mixture = config.mixture;

      const PanelData panel = simulate_var(phi, spec, config.t, config.burn_in, sim_stream);
      const LambdaSelection lambda =
          select_lambda(panel, config.lambda_strategy, lambda_stream, config.fit_options);
      const LassoFit fit = fit_all(panel, lambda.per_row, config.fit_options);
      const ResidualVariances variances = residual_variance(fit, config.dof_rule);
      const Eigen::MatrixXd sigma_x = sample_covariance(panel);
      const PrecisionEstimate precision =
          estimate_precision(sigma_x, config.lambda1_strategy, config.ridge_epsilon, 1, config.t);
      const DebiasedEstimate estimate = debias(fit, panel, precision);
      const HypothesisSet hypotheses = HypothesisSet::full(config.n, config.n * config.k);

      std::vector<TestField> fields;
      fields.reserve(config.variants.size());
      for (SeVariant v : config.variants)
        fields.push_back(
            t_field(estimate, variances, precision, sigma_x, config.t, v, hypotheses));

      std::vector<BootstrapNull> nulls;
      if (need_bootstrap) {
        BootstrapOptions boot;
        boot.b_draws = config.b_draws;
        boot.multiplier = config.multiplier;
        boot.fit_options = config.fit_options;
        SparsityPattern s_tilde = fit.active_sets;
        if (config.s_tilde == STildeChoice::AsymptoticDiscoveries) {
          // One exclusion set shared by all variants (taken from the first
          // requested variant) so the bootstrap draws can be shared too.
          const ThresholdResult t1 = asymptotic_threshold(fields[0], config.q, config.a);
          Eigen::MatrixXd indicator = Eigen::MatrixXd::Zero(config.n, config.n * config.k);
          for (const Discovery& d : discoveries(fields[0], estimate, t1).rejected)
            indicator(d.row, d.col) = 1.0;
          s_tilde = SparsityPattern::from_matrix(indicator);
        }
        nulls = bootstrap_null_multi(panel, fit, precision, s_tilde, hypotheses, boot,
                                     config.variants, boot_stream);
      }

      outcome.scores.reserve(n_cells);
      for (Procedure proc : config.procedures) {
        for (std::size_t v = 0; v < config.variants.size(); ++v) {
          const ThresholdResult threshold =
              proc == Procedure::Asymptotic
                  ? asymptotic_threshold(fields[v], config.q, config.a)
                  : bootstrap_threshold(fields[v], nulls[v], config.q, config.a);
          outcome.scores.push_back(score(discoveries(fields[v], estimate, threshold, proc), phi));
        }
      }
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.message = e.what();
    }
  });

  McResult result;
  for (int rep = 0; rep < config.n_reps; ++rep) {
    if (!outcomes[rep].ok) {
      result.failed_reps.push_back(rep);
      result.failure_messages.push_back(outcomes[rep].message);
    }
  }
  if (result.failed_reps.size() >
      config.max_failure_fraction * static_cast<double>(config.n_reps)) {
    std::string msg = "run_monte_carlo: " + std::to_string(result.failed_reps.size()) +
                      " replications failed; first error: " + result.failure_messages.front();
    throw ConvergenceError(msg, 0.0, result.failed_reps);
  }

  std::size_t cell_index = 0;
  for (Procedure proc : config.procedures) {
    for (SeVariant v : config.variants) {
      McCell cell;
      cell.procedure = proc;
      cell.variant = v;
      std::vector<double> fdp, power;
      for (int rep = 0; rep < config.n_reps; ++rep) {
        if (!outcomes[rep].ok) continue;
        const DirectionalScore& s = outcomes[rep].scores[cell_index];
        cell.per_rep.push_back(s);
        fdp.push_back(s.dfdp);
        power.push_back(s.dpower);
      }
      mean_and_se(fdp, cell.dfdr, cell.dfdr_se);
      mean_and_se(power, cell.dpower, cell.dpower_se);
      result.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

StabilityResult run_stability_experiment(const StabilityConfig& config) {
  if (config.n_reps < 1) throw InvalidArgument("run_stability_experiment: n_reps must be >= 1");
  const int budget = config.thread_budget > 0 ? config.thread_budget : default_thread_budget();
  const RngStream root(config.seed);
  const int p = config.n;  // VAR(1)

  CoefficientMatrix shared_phi;
  if (config.fixed_phi) {
    RngStream phi_stream = root.child(0x5e11ed);
    shared_phi = build_coefficient_matrix(config.n, config.m, config.rho, config.spectral_cap,
                                          phi_stream);
  }
  const ErrorSpec spec = ErrorSpec::identity_normal(config.n);

  std::vector<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>> lasso_hits(
      config.n_reps);
  std::vector<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>> test_hits(
      config.n_reps);
  CoefficientMatrix first_phi = shared_phi;

  parallel_for(config.n_reps, budget, [&](std::size_t rep) {
    RngStream stream = root.child(rep);
    RngStream phi_stream = stream.child(0);
    RngStream sim_stream = stream.child(2);
    RngStream lambda_stream = stream.child(3);

    const CoefficientMatrix phi =
        config.fixed_phi ? shared_phi
                         : build_coefficient_matrix(config.n, config.m, config.rho,
                                                    config.spectral_cap, phi_stream);
    if (rep == 0 && !config.fixed_phi) first_phi = phi;

    const PanelData panel = simulate_var(phi, spec, config.t, config.burn_in, sim_stream);
    const LambdaSelection lambda =
        select_lambda(panel, config.lambda_strategy, lambda_stream, config.fit_options);
    const LassoFit fit = fit_all(panel, lambda.per_row, config.fit_options);
    const ResidualVariances variances = residual_variance(fit, config.dof_rule);
    const Eigen::MatrixXd sigma_x = sample_covariance(panel);
    const PrecisionEstimate precision =
        estimate_precision(sigma_x, config.lambda1_strategy, 0.0, 1, config.t);
    const DebiasedEstimate estimate = debias(fit, panel, precision);
    const HypothesisSet hypotheses = HypothesisSet::full(config.n, p);
    const TestField field = t_field(estimate, variances, precision, sigma_x, config.t,
                                    SeVariant::Sandwich, hypotheses);
    const ThresholdResult threshold = asymptotic_threshold(field, config.q, config.a);
    const DiscoverySet disc = discoveries(field, estimate, threshold);

    lasso_hits[rep].setZero(config.n, p);
    for (auto [i, j] : fit.active_sets.support) lasso_hits[rep](i, j) = 1;
    test_hits[rep].setZero(config.n, p);
    for (const Discovery& d : disc.rejected) test_hits[rep](d.row, d.col) = 1;
  });

  StabilityResult out;
  out.phi = first_phi;
  out.lasso_frequency.setZero(config.n, p);
  out.test_frequency.setZero(config.n, p);
  for (int rep = 0; rep < config.n_reps; ++rep) {
    out.lasso_frequency += lasso_hits[rep].cast<double>();
    out.test_frequency += test_hits[rep].cast<double>();
  }
  out.lasso_frequency /= static_cast<double>(config.n_reps);
  out.test_frequency /= static_cast<double>(config.n_reps);
  return out;
}

}  // namespace gcnet
