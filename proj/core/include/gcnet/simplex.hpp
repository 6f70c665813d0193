#pragma once

#include <Eigen/Dense>

namespace gcnet::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::IterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

// Minimizes c'x subject to A x <= b, x >= 0 with a dense two-phase tableau
// simplex. Rows with negative b are flipped and given artificial variables;
// phase one drives the artificials to zero or declares infeasibility.
// Pricing is Dantzig with a permanent switch to Bland's rule after a run of
// degenerate pivots, and the ratio test breaks ties on the lowest basis
// index, so the pivot sequence is deterministic.
Result solve_inequality(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, int max_iterations = 0);

}  // namespace gcnet::lp
