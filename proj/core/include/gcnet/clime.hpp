#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gcnet/types.hpp"

namespace gcnet {

struct PrecisionEstimate {
  Eigen::MatrixXd omega;  // KN x KN, exactly symmetric after min-magnitude rule
  double lambda1 = 0.0;
  double ridge_epsilon = 0.0;
  // Excess of ||Sigma_eps Theta - I||_max over lambda1 for the
  // pre-symmetrization solution, re-verified by dense multiplication.
  double constraint_violation = 0.0;
  bool diagonal_all_positive = true;
};

// XX'/T, symmetrized by averaging with its transpose.
Eigen::MatrixXd sample_covariance(const PanelData& data);

// One CLIME column: minimize ||theta||_1 subject to ||sigma theta - e_j||_inf
// <= lambda1, solved as a linear program on the split theta = theta+ - theta-.
Eigen::VectorXd clime_column(const Eigen::MatrixXd& sigma, int j, double lambda1,
                             int max_iterations = 0);

// Full CLIME estimate on sigma + ridge_epsilon * I: per-column programs run in
// parallel, followed by the min-magnitude symmetrization.
PrecisionEstimate estimate_precision(const Eigen::MatrixXd& sigma, double lambda1,
                                     double ridge_epsilon = 0.0, int thread_budget = 1);

// Rate-scaled default regularization c0 sqrt(log(KN) / T).
double rate_lambda1(int stacked, int n_obs, double c0 = 0.2);

struct Lambda1Strategy {
  enum class Kind { RateDefault, Fixed, ConstraintPath };
  Kind kind = Kind::RateDefault;
  double value = 0.05;    // Fixed
  double rate_c0 = 0.2;   // RateDefault scale

  // ConstraintPath: smallest grid value for which every column program is
  // feasible within the iteration budget. Empty grid means the default
  // doubling grid {base * 2^k : k = 0..max_doublings}.
  std::vector<double> grid;
  double path_base = 0.005;
  int path_max_doublings = 16;

  static Lambda1Strategy rate_default(double c0 = 0.2) {
    Lambda1Strategy s;
    s.kind = Kind::RateDefault;
    s.rate_c0 = c0;
    return s;
  }
  static Lambda1Strategy fixed(double v) {
    Lambda1Strategy s;
    s.kind = Kind::Fixed;
    s.value = v;
    return s;
  }
  static Lambda1Strategy constraint_path() {
    Lambda1Strategy s;
    s.kind = Kind::ConstraintPath;
    return s;
  }
};

// RateDefault needs the sample size behind sigma; pass n_obs > 0 for it.
double select_lambda1(const Eigen::MatrixXd& sigma, const Lambda1Strategy& strategy,
                      double ridge_epsilon = 0.0, int thread_budget = 1, int n_obs = 0);

// Strategy resolution and estimation in one pass; a ConstraintPath estimate at
// the selected lambda1 is reused rather than re-solved.
PrecisionEstimate estimate_precision(const Eigen::MatrixXd& sigma,
                                     const Lambda1Strategy& strategy, double ridge_epsilon = 0.0,
                                     int thread_budget = 1, int n_obs = 0);

}  // namespace gcnet
