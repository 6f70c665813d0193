#include <doctest.h>

#include <cmath>

#include "gcnet/dgp.hpp"
#include "oracles.hpp"

using namespace gcnet;

TEST_CASE("build_psi matches the band formula") {
  const Eigen::MatrixXd psi = build_psi(20, 2, 0.4);
  CHECK(psi(0, 0) == doctest::Approx(0.4).epsilon(1e-15));              // diagonal exponent 1
  CHECK(psi(0, 4) == 0.0);                                              // |i-j| = 4 > m
  CHECK(psi(0, 2) == doctest::Approx(std::pow(0.4, 1.5)).epsilon(1e-12));
  CHECK(psi(0, 2) == doctest::Approx(0.25298).epsilon(1e-4));
}

TEST_CASE("build_psi is symmetric, banded, and bounded by rho") {
  for (auto [n, m, rho] : {std::tuple{7, 0, 0.9}, {12, 3, 0.4}, {30, 10, 0.7}}) {
    const Eigen::MatrixXd psi = build_psi(n, m, rho);
    CHECK(oracles::exact_equal(psi, psi.transpose()));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(psi(i, j) >= 0.0);
        CHECK(psi(i, j) <= rho);
        if (std::abs(i - j) > m) CHECK(psi(i, j) == 0.0);
        if (std::abs(i - j) <= m) CHECK(psi(i, j) > 0.0);
      }
    }
  }
  CHECK_THROWS_AS(build_psi(0, 2, 0.4), InvalidArgument);
  CHECK_THROWS_AS(build_psi(5, 2, 1.0), InvalidArgument);
}

TEST_CASE("companion_spectral_radius on known cases") {
  CoefficientMatrix zero{Eigen::MatrixXd::Zero(3, 6), VarDims{3, 2, 5}};
  CHECK(companion_spectral_radius(zero) == doctest::Approx(0.0).epsilon(1e-12));

  CoefficientMatrix scalar{Eigen::MatrixXd::Constant(1, 1, 0.5), VarDims{1, 1, 5}};
  CHECK(companion_spectral_radius(scalar) == doctest::Approx(0.5).epsilon(1e-12));

  // N=2, K=2 with Phi_1 = 0.5 I, Phi_2 = 0.25 I: roots of z^2 = 0.5 z + 0.25.
  Eigen::MatrixXd phi(2, 4);
  phi << 0.5, 0, 0.25, 0, 0, 0.5, 0, 0.25;
  CoefficientMatrix two{phi, VarDims{2, 2, 5}};
  const double root = (0.5 + std::sqrt(0.25 + 1.0)) / 2.0;
  CHECK(companion_spectral_radius(two) == doctest::Approx(root).epsilon(1e-10));
  CHECK(root == doctest::Approx(0.809).epsilon(1e-3));
}

TEST_CASE("build_coefficient_matrix row sizes and spectral cap") {
  RngStream rng(11);
  const CoefficientMatrix phi = build_coefficient_matrix(20, 2, 0.4, 0.96, rng);
  CHECK(companion_spectral_radius(phi) <= 0.96);
  const SparsityPattern s = SparsityPattern::from_matrix(phi.values);
  for (int i = 2; i < 18; ++i) CHECK(s.per_row_sizes[i] == 5);
  CHECK(s.max_row_size == 5);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      if (std::abs(i - j) > 2) CHECK(phi.values(i, j) == 0.0);

  RngStream rng7(12);
  const CoefficientMatrix phi7 = build_coefficient_matrix(20, 7, 0.4, 0.96, rng7);
  const SparsityPattern s7 = SparsityPattern::from_matrix(phi7.values);
  CHECK(s7.max_row_size == 15);
  CHECK(s7.per_row_sizes[10] == 15);

  RngStream rng1(13);
  const CoefficientMatrix phi1 = build_coefficient_matrix(1, 0, 0.4, 0.96, rng1);
  CHECK(std::abs(phi1.values(0, 0)) == doctest::Approx(0.4).epsilon(1e-15));

  // Accepted draws satisfy the cap across seeds.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream r(seed);
    CHECK(companion_spectral_radius(build_coefficient_matrix(15, 3, 0.45, 0.96, r)) <= 0.96);
  }
  // Infeasible design exhausts the redraw budget.
  RngStream rng_bad(1);
  CHECK_THROWS_AS(build_coefficient_matrix(40, 10, 0.9, 0.5, rng_bad, 50), ConvergenceError);
}

TEST_CASE("build_sigma_u diagonal and banded recipes") {
  RngStream rng(17);
  const ErrorSpec diag = build_sigma_u(3, SigmaUKind::Diagonal, rng);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(diag.covariance(i, j) == 0.0);
    }
    CHECK(diag.covariance(i, i) >= 0.5);
    CHECK(diag.covariance(i, i) <= 1.5);
  }

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream r(seed);
    const ErrorSpec banded = build_sigma_u(15, SigmaUKind::Banded, r);
    Eigen::LLT<Eigen::MatrixXd> llt(banded.covariance);
    CHECK(llt.info() == Eigen::Success);
    CHECK(banded.covariance(0, 11) == 0.0);  // |i-j| = 11 is outside the band
    CHECK(oracles::exact_equal(banded.covariance, banded.covariance.transpose()));
  }
}

TEST_CASE("mixture analytics match the simulation design values") {
  MixtureParams mp;  // pi = 0.9, xi ~ N(0, 4), zeta ~ N(4, 100)
  CHECK(mp.mean() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mp.sd() == doctest::Approx(3.8781).epsilon(1e-4));
  CHECK(mp.skewness() == doctest::Approx(1.86).epsilon(5e-3));
}

TEST_CASE("sample_errors standard normal moments at scale") {
  ErrorSpec spec = ErrorSpec::identity_normal(3);
  RngStream rng(5);
  const int t = 100000;
  const Eigen::MatrixXd u = sample_errors(spec, t, rng);
  const Eigen::VectorXd mean = u.rowwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 0.05);
  const Eigen::MatrixXd cov = u * u.transpose() / t;
  CHECK((cov - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample_errors per-series variance tracks sigma_i^2") {
  RngStream build_rng(23);
  ErrorSpec spec = build_sigma_u(4, SigmaUKind::Diagonal, build_rng);
  RngStream rng(29);
  const int t = 100000;
  const Eigen::MatrixXd u = sample_errors(spec, t, rng);
  for (int i = 0; i < 4; ++i) {
    const double var = u.row(i).squaredNorm() / t;
    const double rel_se = std::sqrt(2.0 / t);  // relative SE of a variance estimate
    CHECK(std::abs(var / spec.covariance(i, i) - 1.0) < 5.0 * rel_se);
  }
}

TEST_CASE("sample_errors mixture sample moments") {
  ErrorSpec spec = ErrorSpec::identity_normal(1);
  spec.distribution = ErrorDistribution::MixtureNormal;
  RngStream rng(31);
  const int t = 1000000;
  const Eigen::MatrixXd u = sample_errors(spec, t, rng);
  std::vector<double> values(u.data(), u.data() + t);
  const auto m = oracles::sample_moments(values);
  CHECK(std::abs(m.mean) < 0.01);
  CHECK(m.variance == doctest::Approx(1.0).epsilon(0.02));
  CHECK(m.skewness == doctest::Approx(1.86).epsilon(0.06));
  // Kurtosis against the analytic mixture value; the estimator converges
  // slowly for this heavy a fourth moment.
  CHECK(m.kurtosis == doctest::Approx(spec.mixture.kurtosis()).epsilon(0.10));
}

TEST_CASE("sample_errors rejects non-PD covariance") {
  ErrorSpec spec;
  spec.covariance = Eigen::MatrixXd::Zero(2, 2);
  spec.covariance << 1.0, 2.0, 2.0, 1.0;  // indefinite
  RngStream rng(3);
  CHECK_THROWS_AS(sample_errors(spec, 10, rng), NumericalError);
}

TEST_CASE("simulate_var with zero coefficients returns the errors") {
  CoefficientMatrix phi{Eigen::MatrixXd::Zero(3, 3), VarDims{3, 1, 50}};
  ErrorSpec spec = ErrorSpec::identity_normal(3);
  RngStream rng(41);
  RngStream rng_copy = rng;
  const int t = 50, burn = 10;
  const PanelData panel = simulate_var(phi, spec, t, burn, rng);
  const Eigen::MatrixXd u = sample_errors(spec, burn + 1 + t, rng_copy);
  CHECK(oracles::exact_equal(panel.observations, u.rightCols(t)));
}

TEST_CASE("simulate_var AR(1) stationary variance") {
  CoefficientMatrix phi{Eigen::MatrixXd::Constant(1, 1, 0.5), VarDims{1, 1, 10}};
  ErrorSpec spec = ErrorSpec::identity_normal(1);
  RngStream rng(43);
  const int t = 1000000;
  const PanelData panel = simulate_var(phi, spec, t, 500, rng);
  const double var = panel.observations.row(0).squaredNorm() / t;
  CHECK(var == doctest::Approx(1.0 / (1.0 - 0.25)).epsilon(0.015));
}

TEST_CASE("simulate_var is deterministic and stacks lags exactly") {
  RngStream build(47);
  Eigen::MatrixXd vals(2, 6);
  vals << 0.3, 0.1, 0.0, 0.2, 0.05, 0.0, -0.2, 0.25, 0.1, 0.0, 0.0, 0.15;
  CoefficientMatrix phi{vals, VarDims{2, 3, 40}};
  REQUIRE(companion_spectral_radius(phi) < 1.0);
  ErrorSpec spec = ErrorSpec::identity_normal(2);

  RngStream r1(99), r2(99);
  const PanelData a = simulate_var(phi, spec, 40, 20, r1);
  const PanelData b = simulate_var(phi, spec, 40, 20, r2);
  CHECK(oracles::exact_equal(a.observations, b.observations));
  CHECK(oracles::exact_equal(a.design, b.design));
  CHECK_NOTHROW(a.validate());
  for (int col = 3; col < 40; ++col)
    for (int lag = 1; lag <= 3; ++lag)
      CHECK(oracles::exact_equal(a.design.block((lag - 1) * 2, col, 2, 1), a.observations.col(col - lag)));
}

TEST_CASE("simulate_var rejects explosive coefficients") {
  CoefficientMatrix phi{Eigen::MatrixXd::Constant(1, 1, 1.01), VarDims{1, 1, 10}};
  RngStream rng(1);
  CHECK_THROWS_AS(simulate_var(phi, ErrorSpec::identity_normal(1), 10, 5, rng), InvalidArgument);
}
