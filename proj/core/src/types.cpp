#include "gcnet/types.hpp"

namespace gcnet {

void PanelData::validate() const {
  dims.validate();
  const int n = dims.n_series;
  const int k = dims.lag_order;
  const int t = dims.n_obs;
  if (observations.rows() != n || observations.cols() != t)
    throw InvalidArgument("PanelData: observations must be N x T");
  if (design.rows() != n * k || design.cols() != t)
    throw InvalidArgument("PanelData: design must be KN x T");
  if (!observations.allFinite() || !design.allFinite())
    throw InvalidArgument("PanelData: non-finite entries");
  // Lag-stacking consistency is bit-exact where the lagged column is part of
  // the retained sample; the first K design columns hold pre-sample values.
  for (int col = k; col < t; ++col) {
    for (int lag = 1; lag <= k; ++lag) {
      if (design.block((lag - 1) * n, col, n, 1) != observations.col(col - lag))
        throw InvalidArgument("PanelData: design column is not the stack of lagged observations");
    }
  }
}

SparsityPattern SparsityPattern::from_matrix(const Eigen::MatrixXd& values) {
  SparsityPattern out;
  out.per_row_sizes.assign(values.rows(), 0);
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) {
      if (values(i, j) != 0.0) {
        out.support.emplace_back(i, j);
        ++out.per_row_sizes[i];
      }
    }
    out.max_row_size = std::max(out.max_row_size, out.per_row_sizes[i]);
  }
  return out;
}

}  // namespace gcnet
