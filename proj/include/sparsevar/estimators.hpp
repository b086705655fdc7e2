#pragma once

// Row-wise Lasso, vectorized (weighted) Lasso and row-wise Dantzig selector
// on the VAR regression Y = X B + E, plus the S and A modifications.

#include <string>
#include <utility>
#include <vector>

#include "sparsevar/var_model.hpp"

namespace sparsevar {

/// Sample moments shared by every row and every lambda.
struct Moments {
  MatrixXd gram;  // X'X / N, dp x dp
  MatrixXd xty;   // X'Y / N, dp x d
  int n_eff = 0;
};

Moments compute_moments(const SampleDesign& design);

struct CdOptions {
  double tol = 1e-7;         // max coordinate change at convergence
  long max_iter = 100000;    // sweeps
  double kkt_tol = 1e-6;     // certificate checked before returning
};

/// Minimizes (2N)^-1 ||Y e_j - X b||^2 + lambda sum_i w_i |b_i|.
/// `warm` (optional) is the starting point. Throws ConvergenceError.
VectorXd lasso_row(const Moments& mom, int j, double lambda,
                   const VectorXd& weights, const CdOptions& opts = {},
                   const VectorXd* warm = nullptr);
VectorXd lasso_row(const SampleDesign& design, int j, double lambda,
                   const VectorXd& weights, const CdOptions& opts = {});

/// Largest violation of the Lasso subgradient conditions.
double lasso_kkt_violation(const Moments& mom, int j, double lambda,
                           const VectorXd& weights, const VectorXd& beta);

/// Minimizes (2N)^-1 tr((Y - X B) Omega (Y - X B)') + lambda sum w_ij |B_ij|
/// with Omega symmetric positive definite (Omega = I gives the plain
/// vectorized Lasso).
MatrixXd lasso_vec(const Moments& mom, const MatrixXd& omega, double lambda,
                   const MatrixXd& weights, const CdOptions& opts = {},
                   const MatrixXd* warm = nullptr);

double lasso_vec_kkt_violation(const Moments& mom, const MatrixXd& omega,
                               double lambda, const MatrixXd& weights,
                               const MatrixXd& b);

/// min sum_i w_i |b_i| s.t. ||G b - rhs||_max <= lambda, solved as an LP
/// in (b+, b-). Used for Dantzig rows and CLIME columns.
VectorXd dantzig_lp(const MatrixXd& gram, const VectorXd& rhs, double lambda,
                    const VectorXd& weights);

/// Dantzig selector for response j on the design moments.
VectorXd dantzig_row(const Moments& mom, int j, double lambda,
                     const VectorXd& weights);
VectorXd dantzig_row(const SampleDesign& design, int j, double lambda,
                     const VectorXd& weights);

struct StandardizedDesign {
  SampleDesign design;
  VectorXd scale;  // per-component sample standard deviations
};

/// Divides responses by W and regressors by I_p (x) W. Throws
/// DegenerateInputError naming a constant component.
StandardizedDesign standardize(const SampleDesign& design,
                               const TimeSeries& series);

/// B = (I_p (x) W)^-1 B_tilde W.
MatrixXd unstandardize(const MatrixXd& b_tilde, const VectorXd& scale);

/// w_ij = 1 / (|B_ij| + 1/sqrt(n)).
MatrixXd adaptive_weights(const MatrixXd& b_first, int n);

/// Weighted residual sum of squares tr((Y - X B) Omega (Y - X B)').
double weighted_rss(const SampleDesign& design, const MatrixXd& b,
                    const MatrixXd& omega);

}  // namespace sparsevar
