#include "gcnet/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gcnet/clime.hpp"
#include "gcnet/parallel.hpp"

namespace gcnet {

Eigen::VectorXd sample_multipliers(MultiplierKind kind, int t, RngStream& rng) {
  if (t < 1) throw InvalidArgument("sample_multipliers: t must be >= 1");
  Eigen::VectorXd zeta(t);
  if (kind == MultiplierKind::Rademacher) {
    for (int s = 0; s < t; ++s) zeta[s] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    return zeta;
  }
  // Mammen's two-point law: -(sqrt5 - 1)/2 w.p. (sqrt5 + 1)/(2 sqrt5),
  // (sqrt5 + 1)/2 otherwise; mean zero, variance one.
  const double sqrt5 = std::sqrt(5.0);
  const double low = -(sqrt5 - 1.0) / 2.0;
  const double high = (sqrt5 + 1.0) / 2.0;
  const double p_low = (sqrt5 + 1.0) / (2.0 * sqrt5);
  for (int s = 0; s < t; ++s) zeta[s] = rng.bernoulli(p_low) ? low : high;
  return zeta;
}

namespace {

std::uint64_t bytes_hash(const Eigen::MatrixXd& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  const std::size_t len = sizeof(double) * static_cast<std::size_t>(m.size());
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

Eigen::VectorXd column_scale_for(const PrecisionEstimate& precision,
                                 const Eigen::MatrixXd& sigma_x, SeVariant variant) {
  const int p = static_cast<int>(precision.omega.rows());
  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) {
    const double v = variant == SeVariant::Sandwich
                         ? precision.omega.col(j).dot(sigma_x * precision.omega.col(j))
                         : precision.omega(j, j);
    if (!(v > 0.0))
      throw NumericalError("bootstrap_null: nonpositive variance term for column " +
                           std::to_string(j));
    scale[j] = std::sqrt(v);
  }
  return scale;
}

}  // namespace

std::vector<BootstrapNull> bootstrap_null_multi(
    const PanelData& data, const LassoFit& fit, const PrecisionEstimate& precision,
    const SparsityPattern& s_tilde, const HypothesisSet& hypotheses,
    const BootstrapOptions& options, const std::vector<SeVariant>& variants, RngStream root,
    int thread_budget) {
  const int n = data.dims.n_series;
  const int p = data.dims.stacked();
  const int t = data.dims.n_obs;
  const double td = static_cast<double>(t);
  if (options.b_draws < 1) throw InvalidArgument("bootstrap_null: b_draws must be >= 1");
  if (variants.empty()) throw InvalidArgument("bootstrap_null: no variants requested");

  // Null set: hypotheses minus s_tilde, row-major order.
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> tilde_mask(n, p);
  tilde_mask.setConstant(false);
  for (auto [i, j] : s_tilde.support) tilde_mask(i, j) = true;
  std::vector<std::pair<int, int>> null_set;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      if (hypotheses.mask(i, j) && !tilde_mask(i, j)) null_set.emplace_back(i, j);
  if (null_set.empty())
    throw InvalidArgument("bootstrap_null: s_tilde^c n H is empty; the procedure is unavailable");

  const std::uint64_t design_hash = bytes_hash(data.design);
  const Eigen::MatrixXd gram = (data.design * data.design.transpose()) / td;
  const Eigen::MatrixXd sigma_x = sample_covariance(data);
  std::vector<Eigen::VectorXd> scales;
  scales.reserve(variants.size());
  for (SeVariant v : variants) scales.push_back(column_scale_for(precision, sigma_x, v));

  const double sqrt_t = std::sqrt(td);
  const int b = options.b_draws;
  const std::size_t cell = null_set.size();
  // Per-draw, per-variant slots; pooled in draw order after the parallel map.
  std::vector<std::vector<std::vector<double>>> slots(
      b, std::vector<std::vector<double>>(variants.size()));
  std::vector<char> skipped(b, 0);

  FitOptions refit_options = options.fit_options;
  refit_options.throw_on_max_sweeps = false;

  parallel_for(b, thread_budget, [&](std::size_t draw) {
    RngStream stream = root.child(draw);
    const Eigen::VectorXd zeta = options.multiplier_fn
                                     ? options.multiplier_fn(t, stream)
                                     : sample_multipliers(options.multiplier, t, stream);
    // y*_t = Phi_L x_t + u_t zeta_t = y_t + u_t (zeta_t - 1).
    Eigen::MatrixXd ystar = data.observations +
                            fit.residuals * (zeta.array() - 1.0).matrix().asDiagonal();
    const Eigen::MatrixXd xy = (data.design * ystar.transpose()) / td;  // p x n

    Eigen::MatrixXd coef(n, p);
    for (int i = 0; i < n; ++i) {
      const RowFitResult rf = fit_row_gram(gram, xy.col(i), fit.lambda[i], refit_options);
      if (!rf.converged) {
        skipped[draw] = 1;
        return;
      }
      coef.row(i) = rf.coefficients.transpose();
    }

    const Eigen::MatrixXd resid = ystar - coef * data.design;
    const Eigen::MatrixXd debiased =
        coef + resid * data.design.transpose() * precision.omega / td;

    Eigen::VectorXd sigma_star(n);
    for (int i = 0; i < n; ++i) {
      const int dof = t - fit.active_size(i);
      if (dof < 1) {
        skipped[draw] = 1;
        return;
      }
      sigma_star[i] = std::sqrt(resid.row(i).squaredNorm() / static_cast<double>(dof));
    }

    for (std::size_t v = 0; v < variants.size(); ++v) {
      std::vector<double>& out = slots[draw][v];
      out.resize(cell);
      for (std::size_t idx = 0; idx < cell; ++idx) {
        const auto [i, j] = null_set[idx];
        out[idx] = sqrt_t * debiased(i, j) / (sigma_star[i] * scales[v][j]);
      }
    }
  });

  if (bytes_hash(data.design) != design_hash)
    throw NumericalError("bootstrap_null: the fixed design was modified during resampling");

  int n_skipped = 0;
  std::vector<int> skipped_draws;
  for (int draw = 0; draw < b; ++draw)
    if (skipped[draw]) {
      ++n_skipped;
      skipped_draws.push_back(draw);
    }
  if (n_skipped > options.max_skip_fraction * b) {
    std::string msg = "bootstrap_null: " + std::to_string(n_skipped) + " of " +
                      std::to_string(b) + " draws failed to converge (draws";
    for (int d : skipped_draws) msg += " " + std::to_string(d);
    msg += ")";
    throw ConvergenceError(msg, 0.0, skipped_draws);
  }

  std::vector<BootstrapNull> out(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    out[v].b_draws = b;
    out[v].skipped_draws = n_skipped;
    out[v].null_set = null_set;
    out[v].variant = variants[v];
    out[v].sorted_t_values.reserve(static_cast<std::size_t>(b - n_skipped) * cell);
    for (int draw = 0; draw < b; ++draw) {
      if (skipped[draw]) continue;
      const std::vector<double>& s = slots[draw][v];
      out[v].sorted_t_values.insert(out[v].sorted_t_values.end(), s.begin(), s.end());
    }
    std::sort(out[v].sorted_t_values.begin(), out[v].sorted_t_values.end());
  }
  return out;
}

BootstrapNull bootstrap_null(const PanelData& data, const LassoFit& fit,
                             const PrecisionEstimate& precision, const SparsityPattern& s_tilde,
                             const HypothesisSet& hypotheses, const BootstrapOptions& options,
                             SeVariant variant, RngStream root, int thread_budget) {
  return bootstrap_null_multi(data, fit, precision, s_tilde, hypotheses, options, {variant}, root,
                              thread_budget)
      .front();
}

double bootstrap_cdf(const BootstrapNull& null, double t) {
  if (null.sorted_t_values.empty()) throw InvalidArgument("bootstrap_cdf: empty null");
  const auto& v = null.sorted_t_values;
  const auto above = v.end() - std::upper_bound(v.begin(), v.end(), t);
  return static_cast<double>(above) / static_cast<double>(v.size());
}

ThresholdResult bootstrap_threshold(const TestField& field, const BootstrapNull& null, double q,
                                    double a) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("bootstrap_threshold: q must be in [0,1]");
  if (null.sorted_t_values.empty()) throw InvalidArgument("bootstrap_threshold: empty null");

  std::vector<double> stats;
  for (int i = 0; i < field.t_values.rows(); ++i)
    for (int j = 0; j < field.t_values.cols(); ++j)
      if (field.hypotheses.mask(i, j)) stats.push_back(std::abs(field.t_values(i, j)));
  std::sort(stats.begin(), stats.end());
  const int h = static_cast<int>(stats.size());
  if (h == 0) throw InvalidArgument("bootstrap_threshold: empty hypothesis set");

  ThresholdResult result;
  result.q_level = q;
  result.a_constant = a;
  result.search_cap = search_cap(h, a);

  auto count_ge = [&](double t) {
    return static_cast<int>(stats.end() - std::lower_bound(stats.begin(), stats.end(), t));
  };
  auto criterion = [&](double t) {
    const double tail_mass = bootstrap_cdf(null, t) + 1.0 - bootstrap_cdf(null, -t);
    return h * tail_mass / std::max(count_ge(t), 1);
  };

  // Candidate thresholds: 0, the observed |T| values, and the pooled
  // bootstrap magnitudes; the criterion is piecewise constant between them.
  std::vector<double> knots;
  knots.push_back(0.0);
  for (double v : stats)
    if (v > 0.0 && v <= result.search_cap) knots.push_back(v);
  for (double v : null.sorted_t_values) {
    const double av = std::abs(v);
    if (av > 0.0 && av <= result.search_cap) knots.push_back(av);
  }
  knots.push_back(result.search_cap);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  for (double t : knots) {
    if (criterion(t) <= q) {
      result.t0 = t;
      result.rule = ThresholdRule::FdrSearch;
      return result;
    }
  }
  result.t0 = std::sqrt(2.0 * std::log(static_cast<double>(h)));
  result.rule = ThresholdRule::FwerFallback;
  return result;
}

}  // namespace gcnet
