#pragma once

// Innovation covariance and precision estimators built from VAR residuals.

#include <cstdint>

#include "sparsevar/thresholding.hpp"
#include "sparsevar/var_model.hpp"

namespace sparsevar {

struct ResidualMatrix {
  MatrixXd values;  // (n - p) x d, row k is the residual at t = p + 1 + k
  bool centered = false;
};

/// eps_t = X_t - sum_s A_s X_{t-s}, t = p+1..n, in time order.
ResidualMatrix residuals(const TimeSeries& series, const MatrixXd& b_hat,
                         int p, bool center = true);

/// (n - p)^-1 sum eps_t eps_t'.
MatrixXd sample_cov(const ResidualMatrix& res);

/// Thresholds off-diagonal entries only.
MatrixXd threshold_offdiag(const MatrixXd& s, const ThresholdRule& rule,
                           double lambda);

struct CvSpec {
  int splits = 10;
  int grid_size = 30;
  double min_ratio = 0.01;
  std::uint64_t seed = 0;
};

struct ThresholdedCov {
  MatrixXd cov;
  double lambda = 0.0;
};

/// Threshold level chosen by random-split cross-validation with training
/// fraction 1 - 1/log(N) and Frobenius loss against the validation sample
/// covariance.
ThresholdedCov thresholded_cov(const ResidualMatrix& res,
                               const ThresholdRule& rule, const CvSpec& cv);

/// Column j solves min ||b||_1 s.t. ||S b - e_j||_max <= lambda; the result
/// keeps the smaller-magnitude entry of each symmetric pair. `raw` receives
/// the unsymmetrized columns.
MatrixXd clime_precision(const MatrixXd& sigma_hat, double lambda,
                         MatrixXd* raw = nullptr);
MatrixXd clime_precision(const ResidualMatrix& res, double lambda);

/// Inverse of `cov` if it is positive definite, else the inverse of its
/// diagonal. `fallback` reports which branch was taken.
MatrixXd weighting_precision(const MatrixXd& cov, bool* fallback = nullptr);

struct PluginBound {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of
///   ||S_hat - S||_max <= D (2 ||X'E/N||_max + D (||G||_max + ||G - X'X/N||_max))
/// where S, S_hat are the innovation and residual sample covariances,
/// G = Gamma^(st)(0) and D = ||A - A_hat|| in the row-sum norm (or the
/// column-sum norm when `column_norm`).
PluginBound plugin_cov_bound(const SampleDesign& design,
                             const MatrixXd& innovations,
                             const MatrixXd& b_true, const MatrixXd& b_hat,
                             const MatrixXd& gamma_st0,
                             bool column_norm = false);

}  // namespace sparsevar
