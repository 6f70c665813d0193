// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gcnet/discover.hpp"
#include "gcnet/evaluation.hpp"
#include "gcnet/parallel.hpp"

using namespace gcnet;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%-4s %-58s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * v);
  return buf;
}

const McCell& cell_of(const McResult& result, Procedure p, SeVariant v) {
  for (const McCell& cell : result.cells)
    if (cell.procedure == p && cell.variant == v) return cell;
  throw Error("acceptance: missing cell");
}

// ---------------------------------------------------------------------------
// Criteria 1-3: the reference simulation cell, both procedures, both variants.

McResult run_reference_cell(int n_reps, int m, std::vector<SeVariant> variants,
                         std::vector<Procedure> procedures, std::uint64_t seed) {
  McConfig config;
  config.n = 50;
  config.t = 200;
  config.k = 1;
  config.m = m;
  config.rho = 0.4;
  config.q = 0.1;
  config.a = 3.1;
  config.error_dist = ErrorDistribution::StandardNormal;
  config.sigma_u_kind = SigmaUKind::Diagonal;
  config.n_reps = n_reps;
  config.b_draws = 100;
  config.variants = std::move(variants);
  config.procedures = std::move(procedures);
  config.seed = seed;
  config.lambda_strategy = LambdaStrategy::cross_validation(10, /*per_row=*/true);
  config.dof_rule = DofRule::ActiveSetSize;
  return run_monte_carlo(config);
}

void criteria_1_to_3() {
  const auto start = std::chrono::steady_clock::now();
  const McResult result =
      run_reference_cell(200, 2, {SeVariant::Sandwich, SeVariant::DiagOnly},
                      {Procedure::Asymptotic, Procedure::Bootstrap}, 20240501);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;

  const McCell& asy_sw = cell_of(result, Procedure::Asymptotic, SeVariant::Sandwich);
  const McCell& boot_sw = cell_of(result, Procedure::Bootstrap, SeVariant::Sandwich);
  const McCell& asy_do = cell_of(result, Procedure::Asymptotic, SeVariant::DiagOnly);
  const McCell& boot_do = cell_of(result, Procedure::Bootstrap, SeVariant::DiagOnly);

  {
    const bool pass = asy_sw.dfdr >= 0.063 && asy_sw.dfdr <= 0.123 && asy_sw.dpower >= 0.94 &&
                      boot_sw.dfdr >= 0.035 && boot_sw.dfdr <= 0.100 && boot_sw.dpower >= 0.93;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "asym dFDR=%s power=%s | boot dFDR=%s power=%s (%.1f min, %zu failed reps)",
                  pct(asy_sw.dfdr).c_str(), pct(asy_sw.dpower).c_str(),
                  pct(boot_sw.dfdr).c_str(), pct(boot_sw.dpower).c_str(), minutes,
                  result.failed_reps.size());
    report("1. Reference cell N=50 T=200 m=2 (Sandwich)", pass, detail);
  }
  {
    const double gap = std::abs(boot_do.dfdr - boot_sw.dfdr);
    const bool pass = asy_do.dfdr >= 0.03 && asy_do.dfdr <= 0.09 && gap <= 0.035;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "asym dFDR=%s (band 3-9%%), |boot gap to Sandwich|=%.1fpp",
                  pct(asy_do.dfdr).c_str(), 100.0 * gap);
    report("2. DiagOnly variant on the same cell", pass, detail);
  }
  {
    const bool pass = boot_sw.dfdr <= asy_sw.dfdr + 0.015 && boot_do.dfdr <= asy_do.dfdr + 0.015;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "Sandwich: boot %s vs asym %s; DiagOnly: boot %s vs asym %s",
                  pct(boot_sw.dfdr).c_str(), pct(asy_sw.dfdr).c_str(),
                  pct(boot_do.dfdr).c_str(), pct(asy_do.dfdr).c_str());
    report("3. Bootstrap selection is not anticonservative", pass, detail);
  }
}

// ---------------------------------------------------------------------------
// Criterion 4: power decreases in the band width m.

void criterion_4() {
  double power[3];
  int idx = 0;
  for (int m : {2, 4, 7}) {
    const McResult result = run_reference_cell(100, m, {SeVariant::Sandwich},
                                            {Procedure::Asymptotic}, 777000 + m);
    power[idx++] = cell_of(result, Procedure::Asymptotic, SeVariant::Sandwich).dpower;
  }
  const bool pass = power[0] > power[1] + 0.05 && power[1] > power[2] + 0.05;
  char detail[256];
  std::snprintf(detail, sizeof(detail), "power m=2: %s, m=4: %s, m=7: %s",
                pct(power[0]).c_str(), pct(power[1]).c_str(), pct(power[2]).c_str());
  report("4. m-sweep power ordering with 5pp gaps", pass, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: fast property suite.

Eigen::MatrixXd gaussian(int rows, int cols, RngStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

void criterion_5_lasso_kkt() {
  RngStream rng(501);
  int failures = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const int p = 3 + static_cast<int>(rng.uniform() * 25);
    const int t = 20 + static_cast<int>(rng.uniform() * 100);
    const Eigen::MatrixXd x = gaussian(p, t, rng);
    Eigen::VectorXd y(t);
    for (int i = 0; i < t; ++i) y[i] = rng.normal();
    const double lambda_max = ((x * y) / t).cwiseAbs().maxCoeff();
    const double lambda = std::max(1e-4, lambda_max * (0.02 + 0.7 * rng.uniform()));
    const RowFitResult fit = fit_row(x, y, lambda);
    const Eigen::VectorXd corr = x * (y - x.transpose() * fit.coefficients) / t;
    double viol = 0.0;
    for (int j = 0; j < p; ++j) {
      viol = std::max(viol, fit.coefficients[j] == 0.0
                                ? std::max(0.0, std::abs(corr[j]) - lambda)
                                : std::abs(corr[j] -
                                           lambda * (fit.coefficients[j] > 0 ? 1.0 : -1.0)));
    }
    worst = std::max(worst, viol);
    if (viol > 1e-6) ++failures;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "200 instances, worst violation %.2e", worst);
  report("5a. Lasso KKT certificate (tol 1e-6)", failures == 0, detail);
}

void criterion_5_clime() {
  RngStream rng(503);
  int failures = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int p = 3 + static_cast<int>(rng.uniform() * 6);
    Eigen::MatrixXd a = gaussian(p, p, rng);
    const Eigen::MatrixXd sigma =
        a * a.transpose() / p + Eigen::MatrixXd::Identity(p, p);
    const double lambda1 = 0.02 + 0.2 * rng.uniform();
    const PrecisionEstimate est = estimate_precision(sigma, lambda1);
    if (est.constraint_violation > 1e-6) ++failures;
    if (!(est.omega.array() == est.omega.transpose().array()).all()) ++failures;
  }
  double worst_inverse = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int p = 2 + static_cast<int>(rng.uniform() * 5);  // KN <= 6
    Eigen::MatrixXd a = gaussian(p, p, rng);
    const Eigen::MatrixXd sigma =
        a * a.transpose() / p + Eigen::MatrixXd::Identity(p, p);
    const PrecisionEstimate est = estimate_precision(sigma, 1e-8);
    worst_inverse =
        std::max(worst_inverse, (est.omega - sigma.inverse()).cwiseAbs().maxCoeff());
  }
  if (worst_inverse > 1e-4) ++failures;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "100 certificates + symmetry, dense-inverse max err %.2e", worst_inverse);
  report("5b. CLIME certificate, symmetry, inverse oracle", failures == 0, detail);
}

void criterion_5_debias() {
  RngStream rng(505);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 2 + static_cast<int>(rng.uniform() * 4);
    RngStream phi_rng = rng.child(inst);
    const CoefficientMatrix phi = build_coefficient_matrix(n, 1, 0.4, 0.96, phi_rng);
    RngStream sim_rng = rng.child(1000 + inst);
    const PanelData panel =
        simulate_var(phi, ErrorSpec::identity_normal(n), 200, 30, sim_rng);
    const LassoFit fit = fit_all(panel, 0.02 + 0.3 * rng.uniform());
    PrecisionEstimate exact;
    exact.omega = sample_covariance(panel).inverse();
    exact.omega = (0.5 * (exact.omega + exact.omega.transpose())).eval();
    const DebiasedEstimate est = debias(fit, panel, exact);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd ols =
          (panel.design * panel.design.transpose())
              .ldlt()
              .solve(panel.design * panel.observations.row(i).transpose());
      worst = std::max(worst,
                       (est.coefficients.row(i).transpose() - ols).cwiseAbs().maxCoeff());
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "100 instances, max |debiased - OLS| = %.2e", worst);
  report("5c. Debias-OLS identity (tol 1e-8)", worst < 1e-8, detail);
}

void criterion_5_threshold() {
  RngStream rng(507);
  int failures = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int rows = 5 + static_cast<int>(rng.uniform() * 20);
    const int cols = 5 + static_cast<int>(rng.uniform() * 20);
    TestField f;
    f.hypotheses = HypothesisSet::full(rows, cols);
    f.t_values.resize(rows, cols);
    std::vector<double> abs_stats;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        double v = rng.normal();
        if (rng.uniform() < 0.3) v += (rng.bernoulli(0.5) ? 4.0 : -4.0) * rng.uniform();
        f.t_values(i, j) = v;
        abs_stats.push_back(std::abs(v));
      }
    }
    const double q = 0.05 + 0.2 * rng.uniform();
    const ThresholdResult r = asymptotic_threshold(f, q, 3.1);
    // Brute-force fine grid.
    const double step = 1e-4;
    double grid_t0 = -1.0;
    bool grid_fallback = true;
    std::sort(abs_stats.begin(), abs_stats.end());
    const double h = static_cast<double>(abs_stats.size());
    for (double t = 0.0; t <= r.search_cap; t += step) {
      const auto ge =
          abs_stats.end() - std::lower_bound(abs_stats.begin(), abs_stats.end(), t);
      const double ratio =
          2.0 * h * normal_upper_tail(t) / std::max<double>(static_cast<double>(ge), 1.0);
      if (ratio <= q) {
        grid_t0 = t;
        grid_fallback = false;
        break;
      }
    }
    if (r.rule == ThresholdRule::FwerFallback) {
      if (!grid_fallback) ++failures;
    } else if (grid_fallback || r.t0 > grid_t0 + 1e-12) {
      ++failures;
    } else if (grid_t0 - r.t0 > step) {
      // Legitimate only when the sub-level window above t0 is narrower than
      // one grid step (a statistic within one step of the crossing).
      bool stat_in_window = false;
      for (double v : abs_stats) stat_in_window |= (v > r.t0 && v <= r.t0 + step);
      if (!stat_in_window) ++failures;
    }
  }
  report("5d. Threshold scan equals fine-grid oracle", failures == 0,
         failures == 0 ? "100 random fields within one 1e-4 step" :
                         (std::to_string(failures) + " mismatches"));
}

void criterion_5_exactness() {
  TestField f;
  f.hypotheses = HypothesisSet::full(50, 50);
  f.t_values = Eigen::MatrixXd::Zero(50, 50);
  const ThresholdResult r = asymptotic_threshold(f, 0.1, 3.1);
  const bool fallback_exact = r.rule == ThresholdRule::FwerFallback &&
                              r.t0 == std::sqrt(2.0 * std::log(2500.0));
  const double expected_cap =
      std::sqrt(2.0 * std::log(2500.0) - 3.1 * std::log(std::log(2500.0)));
  const bool cap_exact = r.search_cap == expected_cap;
  char detail[160];
  std::snprintf(detail, sizeof(detail), "t0 = %.12f, cap = %.12f", r.t0, r.search_cap);
  report("5e. Fallback and search-cap formulas exact (|H|=2500)", fallback_exact && cap_exact,
         detail);
}

void criterion_5_multipliers() {
  const double sqrt5 = std::sqrt(5.0);
  const double low = -(sqrt5 - 1.0) / 2.0;
  const double high = (sqrt5 + 1.0) / 2.0;
  const double p_low = (sqrt5 + 1.0) / (2.0 * sqrt5);
  const double mean = p_low * low + (1.0 - p_low) * high;
  const double var = p_low * low * low + (1.0 - p_low) * high * high;
  bool pass = std::abs(mean) < 1e-12 && std::abs(var - 1.0) < 1e-12;

  RngStream rng(509);
  for (MultiplierKind kind : {MultiplierKind::Rademacher, MultiplierKind::Mammen}) {
    const Eigen::VectorXd z = sample_multipliers(kind, 1000000, rng);
    const double t = static_cast<double>(z.size());
    const double m1 = z.mean();
    const double m2 = z.squaredNorm() / t - m1 * m1;
    const double m4 = z.array().pow(4).mean();
    const double se_mean = 1.0 / std::sqrt(t);
    // The empirical variance moves by its own sampling error plus the mean^2
    // plug-in term (which is all that remains for Rademacher, where z^2 == 1).
    const double se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / t);
    if (std::abs(m1) > 4.0 * se_mean) pass = false;
    if (std::abs(m2 - 1.0) > 4.0 * se_var + 16.0 * se_mean * se_mean) pass = false;
  }
  report("5f. Multiplier moments analytic and empirical", pass,
         "two-point moments exact; 1e6-draw moments within 4 SE");
}

void criterion_5_determinism() {
  RunConfig config;
  config.simulate = true;
  config.sim.n = 20;
  config.sim.t = 100;
  config.seed = 424242;
  config.b_draws = 50;

  const auto artifacts = [&](int budget) {
    RunConfig c = config;
    c.thread_budget = budget;
    DiscoverReport r = run_discover(c);
    r.config.thread_budget = 0;  // the echo differs only by the budget under test
    std::string blob = report_to_json(r, /*include_timings=*/false);
    for (const ProcedureOutput& out : r.outputs) {
      blob += edge_csv(out.edges, r.names, out.threshold.t0,
                       out.procedure == Procedure::Asymptotic ? "asymptotic" : "bootstrap");
      blob += export_dot(out.edges, r.names);
    }
    return blob;
  };

  const std::string run1 = artifacts(1);
  const std::string run1_again = artifacts(1);
  const std::string run8 = artifacts(8);
  const bool pass = run1 == run1_again && run1 == run8;
  report("5g. Pipeline byte-identical across runs and budgets {1,8}", pass,
         pass ? "edge lists, graphs, and reports agree" : "artifact mismatch");
}

// ---------------------------------------------------------------------------
// Criterion 6: null calibration.

void criterion_6() {
  McConfig config;
  config.n = 20;
  config.t = 200;
  config.m = 2;
  config.rho = 0.0;  // zero coefficients: every rejection is a sign error
  config.q = 0.1;
  config.n_reps = 500;
  config.b_draws = 100;
  config.seed = 606060;
  config.variants = {SeVariant::Sandwich};
  config.procedures = {Procedure::Asymptotic, Procedure::Bootstrap};
  config.lambda_strategy = LambdaStrategy::cross_validation(10, /*per_row=*/true);
  const McResult result = run_monte_carlo(config);
  const double asy = cell_of(result, Procedure::Asymptotic, SeVariant::Sandwich).dfdr;
  const double boot = cell_of(result, Procedure::Bootstrap, SeVariant::Sandwich).dfdr;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "asym dFDR=%s, boot dFDR=%s (500 reps; bound unreachable at |H|=400: "
                "even exact N(0,1) statistics put ~19%% mass past sqrt(2 log|H|))",
                pct(asy).c_str(), pct(boot).c_str());
  report("6. Null calibration dFDR <= 12%", asy <= 0.12 && boot <= 0.12, detail);
}

// ---------------------------------------------------------------------------
// Criterion 7: end-to-end discover on simulated data with export round trip.

void criterion_7() {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("gcnet_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);

  RunConfig config;
  config.simulate = true;
  config.sim.n = 50;
  config.sim.t = 200;
  config.q = 0.1;
  config.b_draws = 100;
  config.seed = 70707;
  config.output_prefix = "accept";

  bool pass = true;
  std::string detail;
  try {
    const DiscoverReport report_run = run_discover(config);
    write_discover_artifacts(report_run, dir.string());
    // Round trip: re-read each edge list and compare against the in-memory
    // records; re-export to DOT and count the arrows.
    for (const ProcedureOutput& out : report_run.outputs) {
      const std::string tag =
          out.procedure == Procedure::Asymptotic ? "asymptotic" : "bootstrap";
      std::vector<std::string> names;
      const auto edges =
          read_edge_csv((dir / ("accept_edges_" + tag + ".csv")).string(), &names);
      if (edges.size() != out.edges.size()) pass = false;
      for (std::size_t i = 0; i < edges.size() && pass; ++i) {
        if (edges[i].source != out.edges[i].source || edges[i].target != out.edges[i].target ||
            edges[i].lags != out.edges[i].lags ||
            edges[i].t_values != out.edges[i].t_values ||
            edges[i].coefficients != out.edges[i].coefficients)
          pass = false;
      }
      const std::string dot = export_dot(edges, names);
      std::size_t arrows = 0;
      for (std::size_t p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 1))
        ++arrows;
      if (arrows != edges.size()) pass = false;
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "asym t0=%.2f, boot t0=%.2f; reference values from the source data "
                  "(2.88/4.41, 2.73/4.22) are documented, not gated",
                  report_run.outputs[0].threshold.t0, report_run.outputs[1].threshold.t0);
    detail = buf;
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  std::filesystem::remove_all(dir);
  report("7. End-to-end discover + export round trip", pass, detail);
}

}  // namespace

int main() {
  std::printf("gcnet acceptance suite (threads: %d)\n", default_thread_budget());
  const auto start = std::chrono::steady_clock::now();

  criteria_1_to_3();
  criterion_4();
  criterion_5_lasso_kkt();
  criterion_5_clime();
  criterion_5_debias();
  criterion_5_threshold();
  criterion_5_exactness();
  criterion_5_multipliers();
  criterion_5_determinism();
  criterion_6();
  criterion_7();

  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  std::printf("%s: %d criterion(s) failed (%.1f min)\n", g_failures == 0 ? "OK" : "FAILED",
              g_failures, minutes);
  return g_failures;
}
