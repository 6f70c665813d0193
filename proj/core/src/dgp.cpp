#include "gcnet/dgp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace gcnet {

Eigen::MatrixXd build_psi(int n, int m, double rho) {
  if (n < 1) throw InvalidArgument("build_psi: n must be >= 1");
  if (m < 0) throw InvalidArgument("build_psi: m must be >= 0");
  if (!(std::abs(rho) < 1.0)) throw InvalidArgument("build_psi: |rho| must be < 1");
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - m); j <= std::min(n - 1, i + m); ++j)
      psi(i, j) = std::pow(rho, 1.0 + std::abs(i - j) / 4.0);
  return psi;
}

Eigen::MatrixXd companion_matrix(const CoefficientMatrix& phi) {
  phi.validate();
  const int n = phi.dims.n_series;
  const int k = phi.dims.lag_order;
  const int p = n * k;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  a.topRows(n) = phi.values;
  if (k > 1) a.block(n, 0, p - n, p - n).setIdentity();
  return a;
}

double companion_spectral_radius(const CoefficientMatrix& phi) {
  const Eigen::MatrixXd a = companion_matrix(phi);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("companion_spectral_radius: eigensolver did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

CoefficientMatrix build_coefficient_matrix(int n, int m, double rho, double spectral_cap,
                                           RngStream& rng, int max_redraws) {
  if (!(spectral_cap > 0.0 && spectral_cap <= 1.0))
    throw InvalidArgument("build_coefficient_matrix: spectral_cap must be in (0, 1]");
  const Eigen::MatrixXd psi = build_psi(n, m, rho);
  CoefficientMatrix out;
  out.dims = VarDims{n, 1, 2};  // n_obs is irrelevant here; 2 satisfies T > K
  for (int attempt = 0; attempt < max_redraws; ++attempt) {
    Eigen::MatrixXd signs(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) signs(i, j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    out.values = psi.cwiseProduct(signs);
    if (companion_spectral_radius(out) <= spectral_cap) return out;
  }
  throw ConvergenceError("build_coefficient_matrix: no sign matrix met the spectral cap after " +
                             std::to_string(max_redraws) + " redraws",
                         spectral_cap);
}

ErrorSpec build_sigma_u(int n, SigmaUKind kind, RngStream& rng) {
  if (n < 1) throw InvalidArgument("build_sigma_u: n must be >= 1");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
  if (kind == SigmaUKind::Diagonal) {
    for (int i = 0; i < n; ++i) sigma(i, i) = rng.uniform(0.5, 1.5);
    return ErrorSpec::standard_normal(sigma);
  }
  for (int i = 0; i < n; ++i) sigma(i, i) = rng.uniform(0.1, 1.9);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n && j - i <= 10; ++j) {
      const double v = sigma(i, i) - (j - i) / 10.0;
      if (v > 0.0) sigma(i, j) = sigma(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (lambda_min <= 0.0) {
    const double c = -lambda_min + 0.1;
    sigma.diagonal().array() += c;
    sigma /= sigma.diagonal().mean();
  }
  return ErrorSpec::standard_normal(sigma);
}

namespace {

double draw_innovation(const ErrorSpec& spec, RngStream& rng) {
  if (spec.distribution == ErrorDistribution::StandardNormal) return rng.normal();
  const MixtureParams& mp = spec.mixture;
  const bool pick_xi = rng.bernoulli(mp.pi);
  const double eta =
      pick_xi ? rng.normal(mp.mu_xi, mp.sigma_xi) : rng.normal(mp.mu_zeta, mp.sigma_zeta);
  return (eta - mp.mean()) / mp.sd();
}

}  // namespace

Eigen::MatrixXd sample_errors(const ErrorSpec& spec, int t, RngStream& rng) {
  if (t < 1) throw InvalidArgument("sample_errors: t must be >= 1");
  spec.validate();
  const int n = static_cast<int>(spec.covariance.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(spec.covariance);
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_errors: covariance is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();
  Eigen::MatrixXd eps(n, t);
  for (int col = 0; col < t; ++col)
    for (int i = 0; i < n; ++i) eps(i, col) = draw_innovation(spec, rng);
  return chol * eps;
}

PanelData simulate_var(const CoefficientMatrix& phi, const ErrorSpec& spec, int t, int burn_in,
                       RngStream& rng) {
  phi.validate();
  if (t < 1) throw InvalidArgument("simulate_var: t must be >= 1");
  if (burn_in < 0) throw InvalidArgument("simulate_var: burn_in must be >= 0");
  const double radius = companion_spectral_radius(phi);
  if (!(radius < 1.0))
    throw InvalidArgument("simulate_var: non-stationary coefficients (spectral radius " +
                          std::to_string(radius) + ")");
  const int n = phi.dims.n_series;
  const int k = phi.dims.lag_order;
  if (t <= k) throw InvalidArgument("simulate_var: t must exceed lag_order");
  const int total = burn_in + k + t;

  const Eigen::MatrixXd errors = sample_errors(spec, total, rng);
  Eigen::MatrixXd path = Eigen::MatrixXd::Zero(n, total);
  for (int col = 0; col < total; ++col) {
    path.col(col) = errors.col(col);
    for (int lag = 1; lag <= k && lag <= col; ++lag)
      path.col(col).noalias() += phi.values.middleCols((lag - 1) * n, n) * path.col(col - lag);
  }

  PanelData out;
  out.dims = VarDims{n, k, t};
  out.observations = path.rightCols(t);
  out.design.resize(k * n, t);
  const int offset = burn_in + k;  // index of the first retained column in path
  for (int col = 0; col < t; ++col)
    for (int lag = 1; lag <= k; ++lag)
      out.design.block((lag - 1) * n, col, n, 1) = path.col(offset + col - lag);
  return out;
}

}  // namespace gcnet
