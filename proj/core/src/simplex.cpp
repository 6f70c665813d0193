#include "gcnet/simplex.hpp"

#include <cmath>
#include <vector>

#include "gcnet/error.hpp"

namespace gcnet::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr int kStallLimit = 64;

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Runs simplex pivots on the given objective row until optimality, the
// iteration cap, or unboundedness. blocked marks columns that may not enter.
Status run_phase(Tableau& tab, std::vector<int>& basis, int obj_row, int n_cols,
                 const std::vector<bool>& blocked, int max_iterations, int& iterations) {
  const int m = static_cast<int>(basis.size());
  const int rhs = n_cols;
  int stall = 0;
  bool bland = false;

  while (iterations < max_iterations) {
    // Entering column.
    int enter = -1;
    double best = -kCostTol;
    for (int j = 0; j < n_cols; ++j) {
      if (blocked[j]) continue;
      const double r = tab(obj_row, j);
      if (bland) {
        if (r < -kCostTol) {
          enter = j;
          break;
        }
      } else if (r < best) {
        best = r;
        enter = j;
      }
    }
    if (enter < 0) return Status::Optimal;

    // Ratio test; ties broken on the lowest basis index.
    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = tab(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = tab(i, rhs) / a;
      if (leave < 0 || ratio < best_ratio - kPivotTol ||
          (ratio < best_ratio + kPivotTol && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return Status::Unbounded;

    if (best_ratio < kPivotTol) {
      if (++stall >= kStallLimit) bland = true;
    } else {
      stall = 0;
    }

    // Pivot.
    ++iterations;
    tab.row(leave) /= tab(leave, enter);
    tab(leave, enter) = 1.0;
    for (int i = 0; i < tab.rows(); ++i) {
      if (i == leave) continue;
      const double factor = tab(i, enter);
      if (factor != 0.0) {
        tab.row(i) -= factor * tab.row(leave);
        tab(i, enter) = 0.0;
      }
    }
    basis[leave] = enter;
  }
  return Status::IterationLimit;
}

}  // namespace

Result solve_inequality(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, int max_iterations) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (b.size() != m || c.size() != n)
    throw InvalidArgument("solve_inequality: inconsistent dimensions");

  // Count artificials: one per row with negative rhs.
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i)
    if (b[i] < 0.0) art_of_row[i] = n_art++;

  const int n_cols = n + m + n_art;  // structural, slack, artificial
  const int rhs = n_cols;
  Tableau tab = Tableau::Zero(m + 2, n_cols + 1);
  const int obj2 = m;      // phase-2 reduced costs
  const int obj1 = m + 1;  // phase-1 reduced costs

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.row(i).head(n) = sign * a.row(i);
    tab(i, n + i) = sign;  // slack
    tab(i, rhs) = sign * b[i];
    if (art_of_row[i] >= 0) {
      tab(i, n + m + art_of_row[i]) = 1.0;
      basis[i] = n + m + art_of_row[i];
    } else {
      basis[i] = n + i;
    }
  }
  tab.row(obj2).head(n) = c.transpose();
  for (int k = 0; k < n_art; ++k) tab(obj1, n + m + k) = 1.0;

  // Price out the initial basis in both objective rows.
  for (int i = 0; i < m; ++i) {
    if (tab(obj1, basis[i]) != 0.0) tab.row(obj1) -= tab(obj1, basis[i]) * tab.row(i);
    if (tab(obj2, basis[i]) != 0.0) tab.row(obj2) -= tab(obj2, basis[i]) * tab.row(i);
  }

  if (max_iterations <= 0) max_iterations = 200 * (m + n) + 2000;
  Result result;

  if (n_art > 0) {
    std::vector<bool> blocked(n_cols, false);
    const Status st =
        run_phase(tab, basis, obj1, n_cols, blocked, max_iterations, result.iterations);
    const double infeas = -tab(obj1, rhs);  // phase-1 objective value
    if (st == Status::IterationLimit) {
      result.status = Status::IterationLimit;
      return result;
    }
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (infeas > 1e-8 * scale) {
      result.status = Status::Infeasible;
      return result;
    }
    // Drive any artificial still basic (at value zero) out of the basis with a
    // degenerate pivot; rows with no eligible pivot column are redundant and
    // stay inert.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n + m) continue;
      int enter = -1;
      double best = kPivotTol;
      for (int j = 0; j < n + m; ++j) {
        if (std::abs(tab(i, j)) > best) {
          best = std::abs(tab(i, j));
          enter = j;
        }
      }
      if (enter < 0) continue;
      tab.row(i) /= tab(i, enter);
      tab(i, enter) = 1.0;
      for (int r = 0; r < tab.rows(); ++r) {
        if (r == i) continue;
        const double factor = tab(r, enter);
        if (factor != 0.0) {
          tab.row(r) -= factor * tab.row(i);
          tab(r, enter) = 0.0;
        }
      }
      basis[i] = enter;
    }
  }

  // Phase 2 with artificial columns blocked from entering.
  std::vector<bool> blocked(n_cols, false);
  for (int k = 0; k < n_art; ++k) blocked[n + m + k] = true;
  result.status = run_phase(tab, basis, obj2, n_cols, blocked, max_iterations, result.iterations);
  if (result.status != Status::Optimal) return result;

  result.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) result.x[basis[i]] = tab(i, rhs);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace gcnet::lp
