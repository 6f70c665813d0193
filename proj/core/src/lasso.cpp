#include "gcnet/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "gcnet/parallel.hpp"

namespace gcnet {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

// KKT residual computed from the correlation vector g = xy - gram * coef.
double kkt_violation_from(const Eigen::VectorXd& g, const Eigen::VectorXd& coef, double lambda) {
  double viol = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double v = coef[j] != 0.0 ? std::abs(g[j] - lambda * (coef[j] > 0.0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(g[j]) - lambda);
    viol = std::max(viol, v);
  }
  return viol;
}

}  // namespace

RowFitResult fit_row_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xy, double lambda,
                          const FitOptions& options, const Eigen::VectorXd* warm_start) {
  if (!(lambda > 0.0)) throw InvalidArgument("fit_row: lambda must be > 0");
  const Eigen::Index p = gram.rows();
  if (gram.cols() != p || xy.size() != p)
    throw InvalidArgument("fit_row: gram must be p x p and xy of length p");

  RowFitResult out;
  out.coefficients = warm_start ? *warm_start : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd q = gram * out.coefficients;  // maintained gram * coef

  for (out.sweeps = 1; out.sweeps <= options.max_sweeps; ++out.sweeps) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = out.coefficients[j];
      const double gjj = gram(j, j);
      double next = 0.0;
      if (gjj > 0.0) next = soft_threshold(xy[j] - q[j] + gjj * old, lambda) / gjj;
      const double delta = next - old;
      if (delta != 0.0) {
        out.coefficients[j] = next;
        q.noalias() += gram.col(j) * delta;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    // Refresh the maintained product occasionally to cap drift from the
    // incremental updates.
    if (out.sweeps % 64 == 0) q.noalias() = gram * out.coefficients;
    if (max_delta <= options.tol) {
      q.noalias() = gram * out.coefficients;
      out.kkt_violation = kkt_violation_from(xy - q, out.coefficients, lambda);
      if (out.kkt_violation <= options.tol) {
        out.converged = true;
        return out;
      }
    }
  }
  q.noalias() = gram * out.coefficients;
  out.kkt_violation = kkt_violation_from(xy - q, out.coefficients, lambda);
  out.sweeps = options.max_sweeps;
  if (options.throw_on_max_sweeps)
    throw ConvergenceError("fit_row: coordinate descent hit the sweep cap (KKT violation " +
                               std::to_string(out.kkt_violation) + ")",
                           out.kkt_violation);
  return out;
}

RowFitResult fit_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_row, double lambda,
                     const FitOptions& options) {
  if (x.cols() != y_row.size()) throw InvalidArgument("fit_row: design/response length mismatch");
  const double t = static_cast<double>(x.cols());
  const Eigen::MatrixXd gram = (x * x.transpose()) / t;
  const Eigen::VectorXd xy = (x * y_row) / t;
  return fit_row_gram(gram, xy, lambda, options);
}

LassoFit fit_all(const PanelData& data, const Eigen::VectorXd& lambda_per_row,
                 const FitOptions& options, int thread_budget) {
  const int n = data.dims.n_series;
  const int p = data.dims.stacked();
  const double t = static_cast<double>(data.dims.n_obs);
  if (lambda_per_row.size() != n)
    throw InvalidArgument("fit_all: lambda vector must have one entry per row");

  const Eigen::MatrixXd gram = (data.design * data.design.transpose()) / t;
  const Eigen::MatrixXd xy_all = (data.design * data.observations.transpose()) / t;  // p x n

  LassoFit fit;
  fit.coefficients.resize(n, p);
  fit.lambda = lambda_per_row;
  fit.sweeps.resize(n);
  std::vector<int> failed;

  FitOptions row_options = options;
  row_options.throw_on_max_sweeps = false;
  std::vector<RowFitResult> rows(n);
  parallel_for(n, thread_budget, [&](std::size_t i) {
    rows[i] = fit_row_gram(gram, xy_all.col(static_cast<Eigen::Index>(i)), lambda_per_row[i],
                           row_options);
  });
  for (int i = 0; i < n; ++i) {
    fit.coefficients.row(i) = rows[i].coefficients.transpose();
    fit.sweeps[i] = rows[i].sweeps;
    if (!rows[i].converged) failed.push_back(i);
  }
  if (!failed.empty() && options.throw_on_max_sweeps) {
    std::string msg = "fit_all: coordinate descent did not converge for rows";
    for (int i : failed) msg += " " + std::to_string(i);
    throw ConvergenceError(msg, 0.0, failed);
  }

  fit.residuals.noalias() = data.observations - fit.coefficients * data.design;
  fit.active_sets = SparsityPattern::from_matrix(fit.coefficients);

  // Definitional certificate from the stored residuals.
  const Eigen::MatrixXd corr = (fit.residuals * data.design.transpose()) / t;  // n x p
  fit.kkt_violation = 0.0;
  for (int i = 0; i < n; ++i)
    fit.kkt_violation = std::max(
        fit.kkt_violation,
        kkt_violation_from(corr.row(i).transpose(), fit.coefficients.row(i).transpose(),
                           lambda_per_row[i]));
  return fit;
}

LassoFit fit_all(const PanelData& data, double lambda, const FitOptions& options,
                 int thread_budget) {
  return fit_all(data, Eigen::VectorXd::Constant(data.dims.n_series, lambda), options,
                 thread_budget);
}

namespace {

struct FoldMoments {
  Eigen::MatrixXd gram_train;  // p x p
  Eigen::MatrixXd xy_train;    // p x n
  int test_begin = 0;
  int test_size = 0;
};

Eigen::VectorXd log_grid(double top, double decades, int size) {
  Eigen::VectorXd grid(size);
  for (int g = 0; g < size; ++g)
    grid[g] = top * std::pow(10.0, -decades * g / std::max(1, size - 1));
  return grid;
}

}  // namespace

LambdaSelection select_lambda(const PanelData& data, const LambdaStrategy& strategy,
                              RngStream& /*rng*/, const FitOptions& options, int thread_budget) {
  const int n = data.dims.n_series;
  const int t = data.dims.n_obs;

  LambdaSelection selection;
  selection.per_row.resize(n);

  if (strategy.kind == LambdaStrategy::Kind::Theory) {
    const double nt = std::max(n, t);
    const double log3 = std::pow(std::log(nt), 3.0);
    const double value = 8.0 * strategy.b_hat * strategy.c_uu_hat *
                         std::sqrt(2.0 * std::pow(strategy.nu + 5.0, 3.0) * log3 / t);
    selection.shared = true;
    selection.shared_value = value;
    selection.per_row.setConstant(value);
    return selection;
  }

  if (strategy.kind == LambdaStrategy::Kind::FixedGrid && strategy.grid.size() == 1) {
    const double value = strategy.grid.front();
    if (!(value > 0.0)) throw InvalidArgument("select_lambda: grid values must be > 0");
    selection.shared = true;
    selection.shared_value = value;
    selection.per_row.setConstant(value);
    return selection;
  }

  // Cross-validated selection over a grid.
  Eigen::VectorXd grid;
  if (strategy.kind == LambdaStrategy::Kind::FixedGrid) {
    if (strategy.grid.empty()) throw FeasibilityError("select_lambda: empty grid");
    grid = Eigen::Map<const Eigen::VectorXd>(strategy.grid.data(),
                                             static_cast<Eigen::Index>(strategy.grid.size()));
    std::sort(grid.data(), grid.data() + grid.size(), std::greater<double>());
  } else {
    const double lambda_max =
        ((data.observations * data.design.transpose()) / static_cast<double>(t))
            .cwiseAbs()
            .maxCoeff();
    if (!(lambda_max > 0.0))
      throw FeasibilityError("select_lambda: degenerate grid (lambda_max = 0)");
    grid = log_grid(lambda_max, strategy.grid_decades, strategy.grid_size);
  }

  const int folds = strategy.n_folds;
  if (folds < 2) throw InvalidArgument("select_lambda: need at least 2 folds");
  if (t < 2 * folds) throw FeasibilityError("select_lambda: degenerate folds (T < 2 folds)");

  const Eigen::MatrixXd gram_full = data.design * data.design.transpose();        // p x p, times T
  const Eigen::MatrixXd xy_full = data.design * data.observations.transpose();    // p x n, times T

  std::vector<FoldMoments> fold_moments(folds);
  for (int f = 0; f < folds; ++f) {
    const int begin = static_cast<int>(static_cast<long>(f) * t / folds);
    const int end = static_cast<int>(static_cast<long>(f + 1) * t / folds);
    const int size = end - begin;
    const auto x_test = data.design.middleCols(begin, size);
    const auto y_test = data.observations.middleCols(begin, size);
    const double t_train = static_cast<double>(t - size);
    fold_moments[f].gram_train = (gram_full - x_test * x_test.transpose()) / t_train;
    fold_moments[f].xy_train = (xy_full - x_test * y_test.transpose()) / t_train;
    fold_moments[f].test_begin = begin;
    fold_moments[f].test_size = size;
  }

  // sse(row, grid point) per fold; folds are reduced in index order afterwards
  // so the totals do not depend on scheduling.
  std::vector<Eigen::MatrixXd> sse_fold(folds, Eigen::MatrixXd::Zero(n, grid.size()));
  FitOptions cv_options = options;
  cv_options.throw_on_max_sweeps = false;

  parallel_for(static_cast<std::size_t>(n) * folds, thread_budget, [&](std::size_t task) {
    const int i = static_cast<int>(task % n);
    const int f = static_cast<int>(task / n);
    const FoldMoments& fm = fold_moments[f];
    const auto x_test = data.design.middleCols(fm.test_begin, fm.test_size);
    const auto y_test = data.observations.row(i).segment(fm.test_begin, fm.test_size);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(gram_full.rows());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
      const RowFitResult rf =
          fit_row_gram(fm.gram_train, fm.xy_train.col(i), grid[g], cv_options, &warm);
      warm = rf.coefficients;
      sse_fold[f](i, g) = (y_test - rf.coefficients.transpose() * x_test).squaredNorm();
    }
  });
  Eigen::MatrixXd sse = Eigen::MatrixXd::Zero(n, grid.size());
  for (int f = 0; f < folds; ++f) sse += sse_fold[f];

  if (strategy.per_row) {
    selection.shared = false;
    selection.shared_value = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      sse.row(i).minCoeff(&best);
      selection.per_row[i] = grid[best];
    }
  } else {
    Eigen::Index best = 0;
    sse.colwise().sum().minCoeff(&best);
    selection.shared = true;
    selection.shared_value = grid[best];
    selection.per_row.setConstant(grid[best]);
  }
  return selection;
}

ResidualVariances residual_variance(const LassoFit& fit, DofRule rule, int fixed_d) {
  const int n = static_cast<int>(fit.residuals.rows());
  const int t = static_cast<int>(fit.residuals.cols());
  ResidualVariances out;
  out.values.resize(n);
  out.dof_adjustment.resize(n);
  for (int i = 0; i < n; ++i) {
    int d = 0;
    switch (rule) {
      case DofRule::ActiveSetSize: d = fit.active_size(i); break;
      case DofRule::Zero: d = 0; break;
      case DofRule::Fixed: d = fixed_d; break;
    }
    if (t - d < 1)
      throw InvalidArgument("residual_variance: d_i = " + std::to_string(d) +
                            " leaves no degrees of freedom (T = " + std::to_string(t) + ")");
    out.dof_adjustment[i] = d;
    out.values[i] = fit.residuals.row(i).squaredNorm() / static_cast<double>(t - d);
  }
  return out;
}

}  // namespace gcnet
