#include <doctest.h>

#include "gcnet/evaluation.hpp"
#include "oracles.hpp"

using namespace gcnet;

namespace {

DiscoverySet set_of(std::vector<Discovery> discoveries) {
  DiscoverySet s;
  s.rejected = std::move(discoveries);
  return s;
}

CoefficientMatrix truth_matrix(const Eigen::MatrixXd& values) {
  return CoefficientMatrix{values, VarDims{static_cast<int>(values.rows()), 1, 2}};
}

}  // namespace

TEST_CASE("score counts sign mismatches and correct discoveries") {
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(3, 3);
  truth(0, 1) = 0.5;   // positive
  truth(1, 2) = 0.25;  // positive

  // One correct positive rejection, one rejection with the wrong sign.
  const DirectionalScore s = score(
      set_of({Discovery{0, 1, 1, 3.0, 0.4}, Discovery{1, 2, -1, -3.0, -0.1}}),
      truth_matrix(truth));
  CHECK(s.n_rejected == 2);
  CHECK(s.n_sign_errors == 1);
  CHECK(s.dfdp == doctest::Approx(0.5));
  CHECK(s.dpower == doctest::Approx(0.5));  // one of two true signals found

  // Empty rejection set: the v 1 convention gives zero.
  const DirectionalScore empty = score(set_of({}), truth_matrix(truth));
  CHECK(empty.dfdp == 0.0);
  CHECK(empty.n_rejected == 0);

  // Exactly the support with correct signs.
  const DirectionalScore perfect = score(
      set_of({Discovery{0, 1, 1, 3.0, 0.4}, Discovery{1, 2, 1, 3.0, 0.2}}),
      truth_matrix(truth));
  CHECK(perfect.dfdp == 0.0);
  CHECK(perfect.dpower == 1.0);

  // A rejection of a true zero is always a sign error.
  const DirectionalScore null_reject =
      score(set_of({Discovery{2, 0, 1, 4.0, 0.3}}), truth_matrix(truth));
  CHECK(null_reject.n_sign_errors == 1);
  CHECK(null_reject.dfdp == 1.0);

  // Empty support: power is vacuously one.
  const DirectionalScore vacuous = score(set_of({}), truth_matrix(Eigen::MatrixXd::Zero(3, 3)));
  CHECK(vacuous.dpower == 1.0);
}

TEST_CASE("score is invariant to rejection order") {
  Eigen::MatrixXd truth = Eigen::MatrixXd::Zero(2, 2);
  truth(0, 1) = -0.3;
  const std::vector<Discovery> forward{Discovery{0, 1, -1, -3.0, -0.2},
                                       Discovery{1, 0, 1, 2.5, 0.1}};
  std::vector<Discovery> backward(forward.rbegin(), forward.rend());
  const DirectionalScore a = score(set_of(forward), truth_matrix(truth));
  const DirectionalScore b = score(set_of(backward), truth_matrix(truth));
  CHECK(a.dfdp == b.dfdp);
  CHECK(a.dpower == b.dpower);
}

TEST_CASE("monte carlo seed splitting preserves early replications") {
  McConfig config;
  config.n = 8;
  config.t = 60;
  config.n_reps = 4;
  config.b_draws = 10;
  config.seed = 17;
  config.procedures = {Procedure::Asymptotic};
  config.lambda_strategy = LambdaStrategy::fixed_grid({0.1});
  config.lambda1_strategy = Lambda1Strategy::fixed(0.1);
  const McResult small = run_monte_carlo(config);
  config.n_reps = 8;
  const McResult large = run_monte_carlo(config);
  REQUIRE(small.cells.size() == 1);
  REQUIRE(large.cells.size() == 1);
  for (int rep = 0; rep < 4; ++rep) {
    CHECK(small.cells[0].per_rep[rep].dfdp == large.cells[0].per_rep[rep].dfdp);
    CHECK(small.cells[0].per_rep[rep].dpower == large.cells[0].per_rep[rep].dpower);
    CHECK(small.cells[0].per_rep[rep].n_rejected == large.cells[0].per_rep[rep].n_rejected);
  }
}

TEST_CASE("monte carlo results are independent of the thread budget") {
  McConfig config;
  config.n = 6;
  config.t = 50;
  config.n_reps = 6;
  config.b_draws = 8;
  config.seed = 23;
  config.lambda_strategy = LambdaStrategy::fixed_grid({0.15});
  config.lambda1_strategy = Lambda1Strategy::fixed(0.1);
  config.thread_budget = 1;
  const McResult serial = run_monte_carlo(config);
  config.thread_budget = 8;
  const McResult parallel = run_monte_carlo(config);
  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (std::size_t c = 0; c < serial.cells.size(); ++c) {
    CHECK(serial.cells[c].dfdr == parallel.cells[c].dfdr);
    CHECK(serial.cells[c].dpower == parallel.cells[c].dpower);
  }
}

TEST_CASE("q = 0 never satisfies the search criterion") {
  McConfig config;
  config.n = 6;
  config.t = 80;
  config.q = 0.0;
  config.n_reps = 5;
  config.seed = 29;
  config.procedures = {Procedure::Asymptotic};
  config.lambda_strategy = LambdaStrategy::fixed_grid({0.1});
  config.lambda1_strategy = Lambda1Strategy::fixed(0.1);
  const McResult result = run_monte_carlo(config);
  // With q = 0 the search cannot succeed, so every replication uses the FWER
  // fallback; sign errors at that threshold are rare.
  double total_dfdp = 0.0;
  for (const auto& rep : result.cells[0].per_rep) total_dfdp += rep.dfdp;
  CHECK(total_dfdp / result.cells[0].per_rep.size() <= 0.05);
}

TEST_CASE("config validation rejects bad inputs") {
  McConfig config;
  config.q = 1.5;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
  config.q = 0.1;
  config.a = 2.0;
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
  config.a = 3.1;
  config.procedures.clear();
  CHECK_THROWS_AS(config.validate(), InvalidArgument);
}
