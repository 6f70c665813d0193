#include "gcnet/debias.hpp"

#include <cmath>
#include <limits>

namespace gcnet {

DebiasedEstimate debias(const LassoFit& fit, const PanelData& data,
                        const PrecisionEstimate& precision) {
  const int p = data.dims.stacked();
  if (precision.omega.rows() != p || precision.omega.cols() != p)
    throw InvalidArgument("debias: precision estimate must be KN x KN");
  if (fit.coefficients.rows() != data.dims.n_series || fit.coefficients.cols() != p)
    throw InvalidArgument("debias: fit does not match panel dimensions");
  const double t = static_cast<double>(data.dims.n_obs);
  DebiasedEstimate out;
  out.correction.noalias() = fit.residuals * data.design.transpose() * precision.omega / t;
  out.coefficients = fit.coefficients + out.correction;
  return out;
}

TestField t_field(const DebiasedEstimate& estimate, const ResidualVariances& variances,
                  const PrecisionEstimate& precision, const Eigen::MatrixXd& sigma_x,
                  int n_obs, SeVariant variant, const HypothesisSet& hypotheses) {
  const int n = static_cast<int>(estimate.coefficients.rows());
  const int p = static_cast<int>(estimate.coefficients.cols());
  if (hypotheses.mask.rows() != n || hypotheses.mask.cols() != p)
    throw InvalidArgument("t_field: hypothesis mask must be N x KN");
  if (variances.values.size() != n)
    throw InvalidArgument("t_field: residual variances must have one entry per row");

  TestField field;
  field.variant = variant;
  field.hypotheses = hypotheses;

  field.row_scale.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!(variances.values[i] > 0.0))
      throw NumericalError("t_field: nonpositive residual variance for row " + std::to_string(i));
    field.row_scale[i] = std::sqrt(variances.values[i]);
  }

  field.column_scale.resize(p);
  for (int j = 0; j < p; ++j) {
    double v = 0.0;
    if (variant == SeVariant::Sandwich) {
      v = precision.omega.col(j).dot(sigma_x * precision.omega.col(j));
    } else {
      v = precision.omega(j, j);
    }
    if (!(v > 0.0))
      throw NumericalError(std::string("t_field: nonpositive variance term (") +
                           (variant == SeVariant::Sandwich ? "Sandwich" : "DiagOnly") +
                           ", column " + std::to_string(j) + ")");
    field.column_scale[j] = std::sqrt(v);
  }

  const double sqrt_t = std::sqrt(static_cast<double>(n_obs));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  field.t_values.setConstant(n, p, nan);
  field.standard_errors.setConstant(n, p, nan);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      if (!hypotheses.mask(i, j)) continue;
      const double se = field.row_scale[i] * field.column_scale[j];
      field.standard_errors(i, j) = se;
      field.t_values(i, j) = sqrt_t * estimate.coefficients(i, j) / se;
    }
  }
  return field;
}

double pair_correlation(const Eigen::MatrixXd& sigma_u, const PrecisionEstimate& precision,
                        std::pair<int, int> pair_a, std::pair<int, int> pair_b) {
  const auto [i, j] = pair_a;
  const auto [k, l] = pair_b;
  const double si = sigma_u(i, i);
  const double sk = sigma_u(k, k);
  const double wj = precision.omega(j, j);
  const double wl = precision.omega(l, l);
  if (!(si > 0.0 && sk > 0.0 && wj > 0.0 && wl > 0.0))
    throw InvalidArgument("pair_correlation: zero or negative diagonal entry");
  return sigma_u(i, k) * precision.omega(j, l) / std::sqrt(si * sk * wj * wl);
}

}  // namespace gcnet
