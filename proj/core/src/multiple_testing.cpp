#include "gcnet/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gcnet {

double normal_upper_tail(double t) { return 0.5 * std::erfc(t * 0.7071067811865475244); }

double normal_upper_tail_inverse(double p) {
  if (!(p > 0.0 && p <= 0.5))
    throw InvalidArgument("normal_upper_tail_inverse: p must be in (0, 0.5]");
  double lo = 0.0, hi = 40.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * (1.0 + lo); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (normal_upper_tail(mid) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double search_cap(int h, double a) {
  if (h < 2) throw InvalidArgument("search_cap: |H| must be >= 2");
  const double log_h = std::log(static_cast<double>(h));
  const double radicand = 2.0 * log_h - a * std::log(log_h);
  if (!(radicand > 0.0))
    throw InvalidArgument("search_cap: 2 log|H| - a log log|H| is not positive (|H| = " +
                          std::to_string(h) + ", a = " + std::to_string(a) + ")");
  return std::sqrt(radicand);
}

namespace {

std::vector<double> sorted_abs_stats(const TestField& field) {
  std::vector<double> out;
  out.reserve(field.hypotheses.count());
  for (int i = 0; i < field.t_values.rows(); ++i)
    for (int j = 0; j < field.t_values.cols(); ++j)
      if (field.hypotheses.mask(i, j)) out.push_back(std::abs(field.t_values(i, j)));
  std::sort(out.begin(), out.end());
  return out;
}

int count_at_least(const std::vector<double>& sorted, double t) {
  return static_cast<int>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t));
}

}  // namespace

ThresholdResult asymptotic_threshold(const TestField& field, double q, double a) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("asymptotic_threshold: q must be in [0,1]");
  const std::vector<double> stats = sorted_abs_stats(field);
  const int h = static_cast<int>(stats.size());
  if (h == 0) throw InvalidArgument("asymptotic_threshold: empty hypothesis set");

  ThresholdResult result;
  result.q_level = q;
  result.a_constant = a;
  result.search_cap = search_cap(h, a);

  const double two_h = 2.0 * h;
  auto ratio = [&](double t) {
    return two_h * normal_upper_tail(t) / std::max(count_at_least(stats, t), 1);
  };

  if (ratio(0.0) <= q) {
    result.t0 = 0.0;
    result.rule = ThresholdRule::FdrSearch;
    return result;
  }

  // Interval knots: distinct statistics below the cap, then the cap itself.
  std::vector<double> knots;
  for (double v : stats)
    if (v > 0.0 && v < result.search_cap && (knots.empty() || v != knots.back()))
      knots.push_back(v);
  knots.push_back(result.search_cap);

  double lo = 0.0;
  for (double hi : knots) {
    // On (lo, hi] the discovery count is constant and Q is decreasing, so the
    // criterion first holds at Q^{-1}(q * count / (2|H|)) if it holds at hi.
    const int count = std::max(count_at_least(stats, hi), 1);
    const double target = q * count / two_h;
    if (normal_upper_tail(hi) <= target && target > 0.0) {
      double t0 = target >= 0.5 ? 0.0 : normal_upper_tail_inverse(target);
      t0 = std::min(std::max(t0, lo), hi);
      // Guard against rounding in the inversion: step up until the recomputed
      // criterion holds; the right endpoint satisfies it by construction.
      for (int guard = 0; guard < 8 && ratio(t0) > q; ++guard)
        t0 = std::nextafter(t0, hi);
      if (ratio(t0) > q) t0 = hi;
      if (ratio(t0) <= q) {
        result.t0 = t0;
        result.rule = ThresholdRule::FdrSearch;
        return result;
      }
    }
    lo = hi;
  }

  result.t0 = std::sqrt(2.0 * std::log(static_cast<double>(h)));
  result.rule = ThresholdRule::FwerFallback;
  return result;
}

DiscoverySet discoveries(const TestField& field, const DebiasedEstimate& estimate,
                         const ThresholdResult& threshold, Procedure procedure) {
  DiscoverySet out;
  out.threshold = threshold;
  out.procedure = procedure;
  for (int i = 0; i < field.t_values.rows(); ++i) {
    for (int j = 0; j < field.t_values.cols(); ++j) {
      if (!field.hypotheses.mask(i, j)) continue;
      const double t = field.t_values(i, j);
      if (std::abs(t) >= threshold.t0) {
        const double coef = estimate.coefficients(i, j);
        out.rejected.push_back(
            Discovery{i, j, coef > 0.0 ? 1 : (coef < 0.0 ? -1 : 0), t, coef});
      }
    }
  }
  return out;
}

std::vector<EdgeRecord> export_network(const DiscoverySet& discoveries, const VarDims& dims,
                                       bool include_self_lags) {
  const int n = dims.n_series;
  std::map<std::pair<int, int>, EdgeRecord> edges;  // (source, target) -> record
  for (const Discovery& d : discoveries.rejected) {
    const int lag = d.col / n + 1;
    const int source = d.col % n;
    const int target = d.row;
    if (source == target && !include_self_lags) continue;
    EdgeRecord& e = edges[{source, target}];
    e.source = source;
    e.target = target;
    e.lags.push_back(lag);
    e.t_values.push_back(d.t_value);
    e.signs.push_back(d.sign);
    e.coefficients.push_back(d.coefficient);
  }
  std::vector<EdgeRecord> out;
  out.reserve(edges.size());
  for (auto& [key, record] : edges) {
    // Order annotations by lag.
    std::vector<int> perm(record.lags.size());
    for (std::size_t idx = 0; idx < perm.size(); ++idx) perm[idx] = static_cast<int>(idx);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return record.lags[a] < record.lags[b]; });
    EdgeRecord sorted;
    sorted.source = record.source;
    sorted.target = record.target;
    for (int idx : perm) {
      sorted.lags.push_back(record.lags[idx]);
      sorted.t_values.push_back(record.t_values[idx]);
      sorted.signs.push_back(record.signs[idx]);
      sorted.coefficients.push_back(record.coefficients[idx]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace gcnet
