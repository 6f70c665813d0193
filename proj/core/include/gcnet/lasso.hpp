#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gcnet/rng.hpp"
#include "gcnet/types.hpp"

namespace gcnet {

struct FitOptions {
  double tol = 1e-7;    // convergence: max coefficient change and KKT residual
  int max_sweeps = 10000;
  bool throw_on_max_sweeps = true;
};

struct RowFitResult {
  Eigen::VectorXd coefficients;
  int sweeps = 0;
  double kkt_violation = 0.0;
  bool converged = false;
};

// Cyclic coordinate descent for one row of the system lasso
//   min (2T)^-1 ||y - phi X||^2 + lambda ||phi||_1
// on precomputed moments gram = XX'/T and xy = Xy'/T. Covariance updating
// keeps each sweep at O(KN^2). A converged fit certifies the subgradient
// conditions: |T^-1 (y - phi X) x_j'| <= lambda + tol off the active set and
// = lambda sign(phi_j) within tol on it.
RowFitResult fit_row_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xy, double lambda,
                          const FitOptions& options = {},
                          const Eigen::VectorXd* warm_start = nullptr);

// Convenience wrapper computing the moments from the design directly.
RowFitResult fit_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_row, double lambda,
                     const FitOptions& options = {});

struct LassoFit {
  Eigen::MatrixXd coefficients;  // N x KN
  Eigen::MatrixXd residuals;     // N x T, exactly Y - coefficients * X
  SparsityPattern active_sets;
  Eigen::VectorXd lambda;        // per-row regularization actually used
  double kkt_violation = 0.0;    // max over rows, recomputed from residuals
  Eigen::VectorXi sweeps;        // per-row sweep counts

  int active_size(int row) const { return active_sets.per_row_sizes[row]; }
};

// Row-wise lasso over the whole system; rows are independent subproblems and
// are fitted in parallel. Throws ConvergenceError listing all failed rows.
LassoFit fit_all(const PanelData& data, const Eigen::VectorXd& lambda_per_row,
                 const FitOptions& options = {}, int thread_budget = 1);
LassoFit fit_all(const PanelData& data, double lambda, const FitOptions& options = {},
                 int thread_budget = 1);

struct LambdaStrategy {
  enum class Kind { Theory, CrossValidation, FixedGrid };
  Kind kind = Kind::CrossValidation;

  // Theory: lambda = 8 b c_uu sqrt(2 (nu+5)^3 log^3(N v T) / T). The constants
  // b and c_uu have no estimator; they are caller inputs.
  double nu = 1.0;
  double b_hat = 1.0;
  double c_uu_hat = 1.0;

  // CrossValidation: contiguous-block folds, log-spaced grid of grid_size
  // points from lambda_max down to 10^-grid_decades * lambda_max.
  int n_folds = 10;
  bool per_row = false;  // per-row argmin instead of one shared lambda
  int grid_size = 100;
  double grid_decades = 3.0;

  // FixedGrid: singleton passes through; larger grids are selected by CV.
  std::vector<double> grid;

  static LambdaStrategy theory(double nu, double b_hat, double c_uu_hat) {
    LambdaStrategy s;
    s.kind = Kind::Theory;
    s.nu = nu;
    s.b_hat = b_hat;
    s.c_uu_hat = c_uu_hat;
    return s;
  }
  static LambdaStrategy cross_validation(int n_folds = 10, bool per_row = false) {
    LambdaStrategy s;
    s.kind = Kind::CrossValidation;
    s.n_folds = n_folds;
    s.per_row = per_row;
    return s;
  }
  static LambdaStrategy fixed_grid(std::vector<double> grid) {
    LambdaStrategy s;
    s.kind = Kind::FixedGrid;
    s.grid = std::move(grid);
    return s;
  }
};

struct LambdaSelection {
  Eigen::VectorXd per_row;  // length N
  bool shared = true;
  double shared_value = 0.0;
};

// The rng parameter is reserved for randomized fold layouts; the default
// contiguous-block folds are deterministic and do not consume draws.
LambdaSelection select_lambda(const PanelData& data, const LambdaStrategy& strategy,
                              RngStream& rng, const FitOptions& options = {},
                              int thread_budget = 1);

enum class DofRule { ActiveSetSize, Zero, Fixed };

struct ResidualVariances {
  Eigen::VectorXd values;          // sigma_i^2 = sum_t u_it^2 / (T - d_i)
  Eigen::VectorXi dof_adjustment;  // d_i
};

ResidualVariances residual_variance(const LassoFit& fit, DofRule rule, int fixed_d = 0);

}  // namespace gcnet
