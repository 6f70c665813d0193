#pragma once

#include <Eigen/Dense>
#include <utility>

#include "gcnet/clime.hpp"
#include "gcnet/lasso.hpp"
#include "gcnet/types.hpp"

namespace gcnet {

// Hypothesis set H as a boolean mask over [N] x [KN]. The default includes
// self-lags; excluding them is an export-time option, not a testing option.
struct HypothesisSet {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;

  static HypothesisSet full(int n, int kn) {
    HypothesisSet h;
    h.mask.setConstant(n, kn, true);
    return h;
  }

  int count() const { return static_cast<int>(mask.count()); }
  bool contains(int i, int j) const { return mask(i, j); }
};

struct DebiasedEstimate {
  Eigen::MatrixXd coefficients;  // lasso coefficients + correction, bit-exact
  Eigen::MatrixXd correction;    // (Y - Phi_L X) X' Omega / T
};

// Debiased lasso estimate; the correction is the residual-design correlation
// weighted by the precision estimate.
DebiasedEstimate debias(const LassoFit& fit, const PanelData& data,
                        const PrecisionEstimate& precision);

enum class SeVariant { Sandwich, DiagOnly };

struct TestField {
  Eigen::MatrixXd t_values;         // NaN outside the hypothesis set
  Eigen::MatrixXd standard_errors;  // sigma_i * column_scale_j
  SeVariant variant = SeVariant::Sandwich;
  HypothesisSet hypotheses;
  Eigen::VectorXd row_scale;     // sigma_i
  Eigen::VectorXd column_scale;  // sqrt(omega_j' Sigma_x omega_j) or sqrt(omega_jj)
};

// t-statistics sqrt(T) phi_ij / (sigma_i * scale_j) over the hypothesis set.
TestField t_field(const DebiasedEstimate& estimate, const ResidualVariances& variances,
                  const PrecisionEstimate& precision, const Eigen::MatrixXd& sigma_x,
                  int n_obs, SeVariant variant, const HypothesisSet& hypotheses);

// Correlation between the linearization terms of two entries:
// sigma_ik omega_jl / (sigma_i sigma_k omega_j omega_l).
double pair_correlation(const Eigen::MatrixXd& sigma_u, const PrecisionEstimate& precision,
                        std::pair<int, int> pair_a, std::pair<int, int> pair_b);

}  // namespace gcnet
