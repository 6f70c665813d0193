#pragma once

#include <Eigen/Dense>

#include "gcnet/rng.hpp"
#include "gcnet/types.hpp"

namespace gcnet {

// Band matrix psi_ij = rho^{1 + |i-j|/4} for |i-j| <= m, zero outside.
Eigen::MatrixXd build_psi(int n, int m, double rho);

// KN x KN companion matrix: block top row Phi_1 ... Phi_K, identity
// subdiagonal blocks.
Eigen::MatrixXd companion_matrix(const CoefficientMatrix& phi);

// Largest eigenvalue modulus of the companion matrix. The same code path is
// used for K = 1, where the companion matrix is Phi itself.
double companion_spectral_radius(const CoefficientMatrix& phi);

// Draws VAR(1) coefficients Psi o Upsilon with i.i.d. +-1 signs, redrawing the
// sign matrix until the spectral radius is <= spectral_cap. Throws
// ConvergenceError after max_redraws rejected draws.
CoefficientMatrix build_coefficient_matrix(int n, int m, double rho, double spectral_cap,
                                           RngStream& rng, int max_redraws = 10000);

enum class SigmaUKind {
  Diagonal,  // diag(sigma_i^2), sigma_i^2 ~ U(0.5, 1.5)
  Banded,    // width-10 band built from sigma_i*^2 ~ U(0.1, 1.9), repaired to PD
};

// Error covariance builder for the simulation designs. The banded recipe
// fills the upper triangle as sigma_ij = sigma_i*^2 - |i-j|/10 (when positive
// and |i-j| <= 10), mirrors it, and if the result is not positive definite
// adds c = -lambda_min + 0.1 to the diagonal and divides by the mean diagonal.
ErrorSpec build_sigma_u(int n, SigmaUKind kind, RngStream& rng);

// N x T error draws: columns are i.i.d. u_t = L eps_t with L the lower
// Cholesky factor of the covariance and eps_ti standardized per spec.
Eigen::MatrixXd sample_errors(const ErrorSpec& spec, int t, RngStream& rng);

// Simulates the VAR(K) recursion from zero initial values, discards the first
// burn_in + K columns, and assembles the panel with its stacked lag design.
// Requires companion_spectral_radius(phi) < 1.
PanelData simulate_var(const CoefficientMatrix& phi, const ErrorSpec& spec, int t, int burn_in,
                       RngStream& rng);

inline constexpr int kDefaultBurnIn = 50;

}  // namespace gcnet
