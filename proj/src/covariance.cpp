#include "sparsevar/covariance.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "sparsevar/errors.hpp"
#include "sparsevar/estimators.hpp"
#include "sparsevar/tuning.hpp"

namespace sparsevar {

ResidualMatrix residuals(const TimeSeries& series, const MatrixXd& b_hat,
                         int p, bool center) {
  const int d = series.d();
  if (b_hat.cols() != d || b_hat.rows() != static_cast<Eigen::Index>(d) * p) {
    throw DimensionError("residuals: coefficient block does not match series");
  }
  const SampleDesign des = build_design(series, p);
  // design rows run backwards in time
  ResidualMatrix out;
  out.values = (des.y_mat - des.x_mat * b_hat).colwise().reverse();
  if (center) {
    out.values.rowwise() -= out.values.colwise().mean();
  }
  out.centered = center;
  return out;
}

MatrixXd sample_cov(const ResidualMatrix& res) {
  if (res.values.rows() < 2) {
    throw InsufficientDataError("sample_cov: need at least two residuals");
  }
  const MatrixXd s =
      res.values.transpose() * res.values / static_cast<double>(res.values.rows());
  return 0.5 * (s + s.transpose());
}

MatrixXd threshold_offdiag(const MatrixXd& s, const ThresholdRule& rule,
                           double lambda) {
  MatrixXd out = threshold_matrix(rule, lambda, s);
  out.diagonal() = s.diagonal();
  return out;
}

namespace {

MatrixXd subset_cov(const MatrixXd& v, const std::vector<int>& idx,
                    std::size_t lo, std::size_t hi) {
  MatrixXd acc = MatrixXd::Zero(v.cols(), v.cols());
  for (std::size_t k = lo; k < hi; ++k) {
    acc.noalias() += v.row(idx[k]).transpose() * v.row(idx[k]);
  }
  return acc / static_cast<double>(hi - lo);
}

}  // namespace

ThresholdedCov thresholded_cov(const ResidualMatrix& res,
                               const ThresholdRule& rule, const CvSpec& cv) {
  rule.validate();
  const MatrixXd s = sample_cov(res);
  const int n = static_cast<int>(res.values.rows());
  MatrixXd off = s;
  off.diagonal().setZero();
  const double top = off.cwiseAbs().maxCoeff();
  if (top == 0.0 || s.rows() == 1) return {s, 0.0};
  if (cv.splits < 1) throw ConfigError("thresholded_cov: splits must be >= 1");

  const int n_train = static_cast<int>(
      std::floor(n * (1.0 - 1.0 / std::log(static_cast<double>(n)))));
  if (n < 4 || n_train < 2 || n - n_train < 1) {
    throw InsufficientDataError("thresholded_cov: too few residuals for "
                                "cross-validation splits");
  }
  const std::vector<double> grid = lambda_grid(top, cv.grid_size, cv.min_ratio);
  std::vector<double> loss(grid.size(), 0.0);
  std::mt19937_64 rng(cv.seed);
  std::vector<int> idx(n);
  for (int split = 0; split < cv.splits; ++split) {
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(idx[i], idx[j]);
    }
    const MatrixXd train = subset_cov(res.values, idx, 0, n_train);
    const MatrixXd valid = subset_cov(res.values, idx, n_train, n);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      loss[g] += (threshold_offdiag(train, rule, grid[g]) - valid).squaredNorm();
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (loss[g] < loss[best]) best = g;
  }
  return {threshold_offdiag(s, rule, grid[best]), grid[best]};
}

MatrixXd clime_precision(const MatrixXd& sigma_hat, double lambda,
                         MatrixXd* raw) {
  const auto d = sigma_hat.rows();
  if (sigma_hat.cols() != d) throw DimensionError("clime: matrix not square");
  MatrixXd cols(d, d);
  const VectorXd ones = VectorXd::Ones(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    cols.col(j) = dantzig_lp(sigma_hat, VectorXd::Unit(d, j), lambda, ones);
  }
  MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      out(i, j) = std::abs(cols(i, j)) <= std::abs(cols(j, i)) ? cols(i, j)
                                                               : cols(j, i);
    }
  }
  if (raw) *raw = cols;
  return out;
}

MatrixXd clime_precision(const ResidualMatrix& res, double lambda) {
  return clime_precision(sample_cov(res), lambda);
}

MatrixXd weighting_precision(const MatrixXd& cov, bool* fallback) {
  Eigen::LLT<MatrixXd> llt(cov);
  const bool ok = llt.info() == Eigen::Success &&
                  llt.matrixLLT().diagonal().minCoeff() > 1e-12 *
                      std::sqrt(cov.diagonal().maxCoeff());
  if (fallback) *fallback = !ok;
  if (ok) {
    MatrixXd inv = llt.solve(MatrixXd::Identity(cov.rows(), cov.cols()));
    return 0.5 * (inv + inv.transpose());
  }
  if ((cov.diagonal().array() <= 0).any()) {
    throw NumericError("weighting_precision: nonpositive variance");
  }
  return cov.diagonal().cwiseInverse().asDiagonal();
}

PluginBound plugin_cov_bound(const SampleDesign& design,
                             const MatrixXd& innovations,
                             const MatrixXd& b_true, const MatrixXd& b_hat,
                             const MatrixXd& gamma_st0, bool column_norm) {
  const double n = design.n_eff;
  const MatrixXd e_hat = design.y_mat - design.x_mat * b_hat;
  const MatrixXd s_hat = e_hat.transpose() * e_hat / n;
  const MatrixXd s = innovations.transpose() * innovations / n;
  const MatrixXd delta = (b_true - b_hat).transpose();  // top block of A - A_hat
  const double dn = column_norm ? delta.cwiseAbs().colwise().sum().maxCoeff()
                                : delta.cwiseAbs().rowwise().sum().maxCoeff();
  const MatrixXd sxe = design.x_mat.transpose() * innovations / n;
  const MatrixXd sxx = design.x_mat.transpose() * design.x_mat / n;
  PluginBound out;
  out.lhs = (s_hat - s).cwiseAbs().maxCoeff();
  out.rhs = dn * (2.0 * sxe.cwiseAbs().maxCoeff() +
                  dn * (gamma_st0.cwiseAbs().maxCoeff() +
                        (gamma_st0 - sxx).cwiseAbs().maxCoeff()));
  return out;
}

}  // namespace sparsevar
