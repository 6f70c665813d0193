#pragma once

// Test-only oracles. Everything here is deliberately independent of the
// library's solution paths: dense linear algebra, brute-force enumeration,
// slow first-order iterations, naive grid scans.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "gcnet/rng.hpp"

namespace oracles {

// Bitwise equality of two dense matrices/vectors (evaluates expressions).
inline bool exact_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a.array() == b.array()).all();
}

// OLS row estimate y X' (XX')^{-1} by dense solve.
inline Eigen::VectorXd ols_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return (x * x.transpose()).ldlt().solve(x * y);
}

// Stationary covariance of a VAR(1): S = A S A' + Q, solved by doubling.
inline Eigen::MatrixXd lyapunov_doubling(Eigen::MatrixXd a, Eigen::MatrixXd q) {
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::MatrixXd q_next = a * q * a.transpose() + q;
    a = (a * a).eval();
    if ((q_next - q).cwiseAbs().maxCoeff() < 1e-14 * (1.0 + q.cwiseAbs().maxCoeff())) {
      return q_next;
    }
    q = q_next;
  }
  return q;
}

// Proximal-gradient (ISTA) lasso on (2T)^-1 ||y - phi X||^2 + lambda ||phi||_1.
inline Eigen::VectorXd ista_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  double lambda, int iterations = 200000) {
  const double t = static_cast<double>(x.cols());
  const Eigen::MatrixXd gram = x * x.transpose() / t;
  const Eigen::VectorXd xy = x * y / t;
  const double lip = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram)
                         .eigenvalues()
                         .maxCoeff();
  const double step = 1.0 / lip;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(x.rows());
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd z = phi - step * (gram * phi - xy);
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
      const double thr = step * lambda;
      phi[j] = z[j] > thr ? z[j] - thr : (z[j] < -thr ? z[j] + thr : 0.0);
    }
  }
  return phi;
}

// Minimal l1 norm over {theta : ||sigma theta - e_j||_inf <= lambda1} by
// enumerating intersections of p hyperplanes drawn from the 2p constraint
// faces and the p coordinate planes. Only sensible for p <= 4.
inline double clime_l1_vertex_oracle(const Eigen::MatrixXd& sigma, int j, double lambda1) {
  const int p = static_cast<int>(sigma.rows());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
  e[j] = 1.0;
  // Plane k in [0, p): sigma row k = e_k + lambda1; [p, 2p): = e_k - lambda1;
  // [2p, 3p): theta_{k - 2p} = 0.
  std::vector<int> planes(3 * p);
  for (int i = 0; i < 3 * p; ++i) planes[i] = i;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(p);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == p) {
      Eigen::MatrixXd a(p, p);
      Eigen::VectorXd b(p);
      for (int r = 0; r < p; ++r) {
        const int plane = pick[r];
        if (plane < 2 * p) {
          const int row = plane % p;
          a.row(r) = sigma.row(row);
          b[r] = e[row] + (plane < p ? lambda1 : -lambda1);
        } else {
          a.row(r).setZero();
          a(r, plane - 2 * p) = 1.0;
          b[r] = 0.0;
        }
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd theta = lu.solve(b);
      if (((sigma * theta - e).cwiseAbs().array() <= lambda1 + 1e-9).all())
        best = std::min(best, theta.lpNorm<1>());
      return;
    }
    for (int i = start; i <= 3 * p - (p - depth); ++i) {
      pick[depth] = planes[i];
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Fine-grid version of the Procedure 1 threshold search.
struct GridThreshold {
  double t0 = 0.0;
  bool fallback = false;
};

inline GridThreshold grid_threshold(const std::vector<double>& abs_stats, double q, double cap,
                                    double step) {
  std::vector<double> sorted = abs_stats;
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size());
  auto ratio = [&](double t) {
    const auto ge = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t);
    const double q_tail = 0.5 * std::erfc(t * 0.7071067811865475244);
    return 2.0 * h * q_tail / std::max<double>(static_cast<double>(ge), 1.0);
  };
  for (double t = 0.0; t <= cap; t += step) {
    if (ratio(t) <= q) return {t, false};
  }
  return {std::sqrt(2.0 * std::log(h)), true};
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

inline Moments sample_moments(const std::vector<double>& values) {
  Moments m;
  const double n = static_cast<double>(values.size());
  for (double v : values) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2;
  m.skewness = m3 / std::pow(m2, 1.5);
  m.kurtosis = m4 / (m2 * m2);
  return m;
}

// Deterministic random test matrices.
inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, gcnet::RngStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// Well-conditioned random SPD matrix.
inline Eigen::MatrixXd spd_matrix(int p, gcnet::RngStream& rng) {
  const Eigen::MatrixXd a = gaussian_matrix(p, p, rng);
  return a * a.transpose() / p + Eigen::MatrixXd::Identity(p, p);
}

}  // namespace oracles
