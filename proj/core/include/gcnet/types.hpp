#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "gcnet/error.hpp"

namespace gcnet {

// Dimensions of a VAR(K) panel: N series, K lags, T usable observations.
struct VarDims {
  int n_series = 0;   // N
  int lag_order = 0;  // K
  int n_obs = 0;      // T

  int stacked() const { return n_series * lag_order; }  // KN

  void validate() const {
    if (n_series < 1) throw InvalidArgument("VarDims: n_series must be >= 1");
    if (lag_order < 1) throw InvalidArgument("VarDims: lag_order must be >= 1");
    if (n_obs <= lag_order) throw InvalidArgument("VarDims: n_obs must exceed lag_order");
  }
};

// Stacked VAR coefficients, N x KN with row i = (phi_{i.,1}, ..., phi_{i.,K}).
struct CoefficientMatrix {
  Eigen::MatrixXd values;
  VarDims dims;

  void validate() const {
    dims.validate();
    if (values.rows() != dims.n_series || values.cols() != dims.stacked())
      throw InvalidArgument("CoefficientMatrix: shape must be N x KN");
    if (!values.allFinite()) throw InvalidArgument("CoefficientMatrix: non-finite entries");
  }
};

enum class ErrorDistribution { StandardNormal, MixtureNormal };

// Two-component normal mixture eta = q*xi + (1-q)*zeta, q ~ Ber(pi).
// The innovation is the standardized (eta - mean)/sd.
struct MixtureParams {
  double pi = 0.9;
  double mu_xi = 0.0;
  double sigma_xi = 2.0;
  double mu_zeta = 4.0;
  double sigma_zeta = 10.0;

  double mean() const { return pi * mu_xi + (1.0 - pi) * mu_zeta; }

  double second_moment() const {
    return pi * (mu_xi * mu_xi + sigma_xi * sigma_xi) +
           (1.0 - pi) * (mu_zeta * mu_zeta + sigma_zeta * sigma_zeta);
  }

  double sd() const { return std::sqrt(second_moment() - mean() * mean()); }

  // Central moments of the mixture; used for analytic skewness/kurtosis.
  double third_central_moment() const {
    const double mu = mean();
    auto part = [&](double m, double s) {
      const double d = m - mu;
      return d * d * d + 3.0 * d * s * s;
    };
    return pi * part(mu_xi, sigma_xi) + (1.0 - pi) * part(mu_zeta, sigma_zeta);
  }

  double fourth_central_moment() const {
    const double mu = mean();
    auto part = [&](double m, double s) {
      const double d = m - mu;
      const double s2 = s * s;
      return d * d * d * d + 6.0 * d * d * s2 + 3.0 * s2 * s2;
    };
    return pi * part(mu_xi, sigma_xi) + (1.0 - pi) * part(mu_zeta, sigma_zeta);
  }

  double skewness() const {
    const double s = sd();
    return third_central_moment() / (s * s * s);
  }

  double kurtosis() const {
    const double v = sd() * sd();
    return fourth_central_moment() / (v * v);
  }

  void validate() const {
    if (!(pi >= 0.0 && pi <= 1.0)) throw InvalidArgument("MixtureParams: pi must be in [0,1]");
    for (double v : {mu_xi, sigma_xi, mu_zeta, sigma_zeta})
      if (!std::isfinite(v)) throw InvalidArgument("MixtureParams: non-finite parameter");
    if (sd() <= 0.0) throw InvalidArgument("MixtureParams: degenerate mixture (sd = 0)");
  }
};

// Error term specification: covariance Sigma_u plus innovation distribution.
struct ErrorSpec {
  Eigen::MatrixXd covariance;
  ErrorDistribution distribution = ErrorDistribution::StandardNormal;
  MixtureParams mixture;

  static ErrorSpec standard_normal(const Eigen::MatrixXd& covariance) {
    return ErrorSpec{covariance, ErrorDistribution::StandardNormal, {}};
  }

  static ErrorSpec identity_normal(int n) {
    return standard_normal(Eigen::MatrixXd::Identity(n, n));
  }

  void validate() const {
    if (covariance.rows() != covariance.cols())
      throw InvalidArgument("ErrorSpec: covariance must be square");
    if (!covariance.allFinite()) throw InvalidArgument("ErrorSpec: non-finite covariance");
    if (!covariance.isApprox(covariance.transpose(), 1e-12))
      throw InvalidArgument("ErrorSpec: covariance must be symmetric");
    if (distribution == ErrorDistribution::MixtureNormal) mixture.validate();
  }
};

// Observations Y (N x T, column t = y_t) and the stacked lag design X
// (KN x T, column t = (y_{t-1}', ..., y_{t-K}')').
struct PanelData {
  Eigen::MatrixXd observations;
  Eigen::MatrixXd design;
  VarDims dims;

  void validate() const;
};

// Support of a sparse coefficient matrix together with row-wise sizes.
struct SparsityPattern {
  std::vector<std::pair<int, int>> support;  // (row in [N], col in [KN])
  std::vector<int> per_row_sizes;
  int max_row_size = 0;

  static SparsityPattern from_matrix(const Eigen::MatrixXd& values);

  void validate() const {
    long total = 0;
    int max_seen = 0;
    for (int s : per_row_sizes) {
      total += s;
      max_seen = std::max(max_seen, s);
    }
    if (total != static_cast<long>(support.size()))
      throw InvalidArgument("SparsityPattern: per_row_sizes does not sum to |support|");
    if (max_seen != max_row_size)
      throw InvalidArgument("SparsityPattern: max_row_size mismatch");
  }
};

}  // namespace gcnet
