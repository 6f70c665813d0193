#include "gcnet/clime.hpp"

#include <cmath>
#include <optional>

#include "gcnet/parallel.hpp"
#include "gcnet/simplex.hpp"

namespace gcnet {

namespace {

Eigen::MatrixXd split_constraints(const Eigen::MatrixXd& sigma) {
  const int p = static_cast<int>(sigma.rows());
  Eigen::MatrixXd a(2 * p, 2 * p);
  a.topLeftCorner(p, p) = sigma;
  a.topRightCorner(p, p) = -sigma;
  a.bottomLeftCorner(p, p) = -sigma;
  a.bottomRightCorner(p, p) = sigma;
  return a;
}

Eigen::VectorXd column_rhs(int p, int j, double lambda1) {
  Eigen::VectorXd b = Eigen::VectorXd::Constant(2 * p, lambda1);
  b[j] += 1.0;
  b[p + j] -= 1.0;
  return b;
}

Eigen::VectorXd solve_column(const Eigen::MatrixXd& a, int p, int j, double lambda1,
                             int max_iterations) {
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(2 * p);
  const lp::Result res = lp::solve_inequality(a, column_rhs(p, j, lambda1), c, max_iterations);
  switch (res.status) {
    case lp::Status::Optimal:
      return res.x.head(p) - res.x.tail(p);
    case lp::Status::Infeasible:
      throw FeasibilityError("clime: column " + std::to_string(j) +
                                 " is infeasible at lambda1 = " + std::to_string(lambda1) +
                                 "; increase lambda1 or set ridge_epsilon > 0",
                             j);
    case lp::Status::IterationLimit:
      throw ConvergenceError(
          "clime: column " + std::to_string(j) + " hit the simplex iteration cap", 0.0, {j});
    case lp::Status::Unbounded:
      throw NumericalError("clime: column " + std::to_string(j) +
                           " reported unbounded (objective is bounded below; numerical failure)");
  }
  throw NumericalError("clime: unreachable solver status");
}

void check_square(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
    throw InvalidArgument("clime: sigma must be square and non-empty");
  if (!sigma.allFinite()) throw InvalidArgument("clime: sigma has non-finite entries");
}

}  // namespace

Eigen::MatrixXd sample_covariance(const PanelData& data) {
  const double t = static_cast<double>(data.dims.n_obs);
  Eigen::MatrixXd s = (data.design * data.design.transpose()) / t;
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd clime_column(const Eigen::MatrixXd& sigma, int j, double lambda1,
                             int max_iterations) {
  check_square(sigma);
  if (j < 0 || j >= sigma.rows()) throw InvalidArgument("clime_column: column index out of range");
  if (!(lambda1 >= 0.0)) throw InvalidArgument("clime_column: lambda1 must be >= 0");
  return solve_column(split_constraints(sigma), static_cast<int>(sigma.rows()), j, lambda1,
                      max_iterations);
}

PrecisionEstimate estimate_precision(const Eigen::MatrixXd& sigma, double lambda1,
                                     double ridge_epsilon, int thread_budget) {
  check_square(sigma);
  if (!(lambda1 >= 0.0)) throw InvalidArgument("estimate_precision: lambda1 must be >= 0");
  if (!(ridge_epsilon >= 0.0))
    throw InvalidArgument("estimate_precision: ridge_epsilon must be >= 0");
  const int p = static_cast<int>(sigma.rows());
  Eigen::MatrixXd sigma_eps = sigma;
  sigma_eps.diagonal().array() += ridge_epsilon;
  const Eigen::MatrixXd a = split_constraints(sigma_eps);

  Eigen::MatrixXd theta(p, p);
  parallel_for(p, thread_budget, [&](std::size_t j) {
    theta.col(static_cast<Eigen::Index>(j)) =
        solve_column(a, p, static_cast<int>(j), lambda1, /*max_iterations=*/0);
  });

  PrecisionEstimate out;
  out.lambda1 = lambda1;
  out.ridge_epsilon = ridge_epsilon;
  const double max_norm = (sigma_eps * theta - Eigen::MatrixXd::Identity(p, p))
                              .cwiseAbs()
                              .maxCoeff();
  out.constraint_violation = std::max(0.0, max_norm - lambda1);

  out.omega.resize(p, p);
  for (int i = 0; i < p; ++i) {
    out.omega(i, i) = theta(i, i);
    for (int j = i + 1; j < p; ++j) {
      const double v = std::abs(theta(i, j)) <= std::abs(theta(j, i)) ? theta(i, j) : theta(j, i);
      out.omega(i, j) = out.omega(j, i) = v;
    }
  }
  out.diagonal_all_positive = (out.omega.diagonal().array() > 0.0).all();
  return out;
}

namespace {

std::vector<double> path_grid(const Lambda1Strategy& s) {
  if (!s.grid.empty()) {
    std::vector<double> g = s.grid;
    std::sort(g.begin(), g.end());
    return g;
  }
  std::vector<double> g;
  double v = s.path_base;
  for (int k = 0; k <= s.path_max_doublings; ++k, v *= 2.0) g.push_back(v);
  return g;
}

std::optional<PrecisionEstimate> try_estimate(const Eigen::MatrixXd& sigma, double lambda1,
                                              double ridge_epsilon, int thread_budget) {
  try {
    PrecisionEstimate est = estimate_precision(sigma, lambda1, ridge_epsilon, thread_budget);
    if (est.constraint_violation > 1e-6) return std::nullopt;
    return est;
  } catch (const FeasibilityError&) {
    return std::nullopt;
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
}

}  // namespace

double rate_lambda1(int stacked, int n_obs, double c0) {
  if (stacked < 1 || n_obs < 1) throw InvalidArgument("rate_lambda1: bad dimensions");
  return c0 * std::sqrt(std::log(std::max(stacked, 3)) / static_cast<double>(n_obs));
}

PrecisionEstimate estimate_precision(const Eigen::MatrixXd& sigma,
                                     const Lambda1Strategy& strategy, double ridge_epsilon,
                                     int thread_budget, int n_obs) {
  switch (strategy.kind) {
    case Lambda1Strategy::Kind::Fixed:
      return estimate_precision(sigma, strategy.value, ridge_epsilon, thread_budget);
    case Lambda1Strategy::Kind::RateDefault:
      if (n_obs < 1)
        throw InvalidArgument("estimate_precision: RateDefault needs the sample size n_obs");
      return estimate_precision(
          sigma, rate_lambda1(static_cast<int>(sigma.rows()), n_obs, strategy.rate_c0),
          ridge_epsilon, thread_budget);
    case Lambda1Strategy::Kind::ConstraintPath:
      for (double lambda1 : path_grid(strategy)) {
        auto est = try_estimate(sigma, lambda1, ridge_epsilon, thread_budget);
        if (est) return *est;
      }
      throw FeasibilityError("estimate_precision: no feasible lambda1 on the grid");
  }
  throw InvalidArgument("estimate_precision: unknown strategy");
}

double select_lambda1(const Eigen::MatrixXd& sigma, const Lambda1Strategy& strategy,
                      double ridge_epsilon, int thread_budget, int n_obs) {
  if (strategy.kind == Lambda1Strategy::Kind::Fixed) {
    if (!(strategy.value >= 0.0)) throw InvalidArgument("select_lambda1: value must be >= 0");
    return strategy.value;
  }
  if (strategy.kind == Lambda1Strategy::Kind::RateDefault) {
    if (n_obs < 1)
      throw InvalidArgument("select_lambda1: RateDefault needs the sample size n_obs");
    return rate_lambda1(static_cast<int>(sigma.rows()), n_obs, strategy.rate_c0);
  }
  return estimate_precision(sigma, strategy, ridge_epsilon, thread_budget).lambda1;
}

}  // namespace gcnet
