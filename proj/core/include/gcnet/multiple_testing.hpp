#pragma once

#include <vector>

#include "gcnet/debias.hpp"
#include "gcnet/types.hpp"

namespace gcnet {

// Standard normal upper tail Q(t) = P(Z > t) via the complementary error
// function; accurate to >= 12 significant digits over t in [0, 10].
double normal_upper_tail(double t);

// Inverse of Q on t >= 0 for p in (0, 0.5].
double normal_upper_tail_inverse(double p);

enum class ThresholdRule { FdrSearch, FwerFallback };
enum class Procedure { Asymptotic, Bootstrap };

struct ThresholdResult {
  double t0 = 0.0;
  ThresholdRule rule = ThresholdRule::FdrSearch;
  double search_cap = 0.0;  // t_bar
  double q_level = 0.0;
  double a_constant = 0.0;
};

// sqrt(2 log h - a log log h); throws when h < 2 or the radicand is not
// positive (the regime is outside the asymptotics).
double search_cap(int h, double a);

// Procedure 1: the smallest t in [0, t_bar] with
// 2 |H| Q(t) / (|S(t)| v 1) <= q, located exactly by scanning the intervals
// between sorted |T| values and inverting Q inside the bracketing interval.
// When no such t exists the FWER fallback t0 = sqrt(2 log |H|) is used.
ThresholdResult asymptotic_threshold(const TestField& field, double q, double a = 3.1);

struct Discovery {
  int row = 0;  // i: the predicted series
  int col = 0;  // j: position in the stacked lag blocks
  int sign = 0;
  double t_value = 0.0;
  double coefficient = 0.0;
};

struct DiscoverySet {
  std::vector<Discovery> rejected;  // row-major order
  ThresholdResult threshold;
  Procedure procedure = Procedure::Asymptotic;
};

DiscoverySet discoveries(const TestField& field, const DebiasedEstimate& estimate,
                         const ThresholdResult& threshold,
                         Procedure procedure = Procedure::Asymptotic);

// Directed edge source -> target with one entry per significant lag.
struct EdgeRecord {
  int source = 0;
  int target = 0;
  std::vector<int> lags;
  std::vector<double> t_values;
  std::vector<int> signs;
  std::vector<double> coefficients;
};

// Maps rejected (row, col) pairs to directed edges source -> row, deduplicated
// across lags. A rejection of (i, j) with j in lag block k of series s means s
// Granger-causes i at lag k.
std::vector<EdgeRecord> export_network(const DiscoverySet& discoveries, const VarDims& dims,
                                       bool include_self_lags = false);

}  // namespace gcnet
