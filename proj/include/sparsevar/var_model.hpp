#pragma once

// Core VAR(p) algebra: model representation, companion form, exact
// second-order quantities, simulation, regression design and forecasting.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sparsevar {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A VAR(p) process X_t = sum_k A_k X_{t-k} + eps_t with Cov(eps_t) = Sigma.
class VarModel {
 public:
  /// Validates shapes, symmetry (1e-12) and a positive diagonal of `sigma`.
  VarModel(std::vector<MatrixXd> coeffs, MatrixXd sigma);

  int p() const { return static_cast<int>(coeffs_.size()); }
  int d() const { return static_cast<int>(sigma_.rows()); }
  const std::vector<MatrixXd>& coeffs() const { return coeffs_; }
  const MatrixXd& coeff(int lag) const { return coeffs_.at(lag - 1); }
  const MatrixXd& sigma() const { return sigma_; }

 private:
  std::vector<MatrixXd> coeffs_;
  MatrixXd sigma_;
};

/// Stacked VAR(1) representation W_t = A W_{t-1} + E eps_t.
struct CompanionForm {
  MatrixXd a_stack;  // dp x dp
  MatrixXd embed;    // dp x d, E = e_1 (x) I_d
  int dp = 0;
};

/// Observations, row t holds X_t^T (0-based in memory, 1-based in math).
class TimeSeries {
 public:
  explicit TimeSeries(MatrixXd values);

  int n() const { return static_cast<int>(values_.rows()); }
  int d() const { return static_cast<int>(values_.cols()); }
  const MatrixXd& values() const { return values_; }

 private:
  MatrixXd values_;
};

/// Regression form Y = X B + E with Y = (X_n, ..., X_{p+1})^T and
/// X = (W_{n-1}, ..., W_p)^T.
struct SampleDesign {
  MatrixXd y_mat;  // N x d
  MatrixXd x_mat;  // N x dp
  int n_eff = 0;
  int p = 0;
  int d = 0;
};

/// Approximate sparsity classes for coefficient sets (variant 1 or 2).
struct SparsityClass {
  int variant = 1;
  double q = 0.0;
  double s = 1.0;
  double m_bound = 1.0;
  int p = 1;

  void validate() const;
};

/// Result of a class membership test; `violated` names the first failing
/// inequality, `lhs` and `rhs` its two sides.
struct MembershipReport {
  bool member = true;
  std::string violated;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Coefficient block B = (A_1^T; ...; A_p^T), dp x d.
MatrixXd stack_coefficients(std::span<const MatrixXd> coeffs);
/// Inverse of stack_coefficients.
std::vector<MatrixXd> unstack_coefficients(const MatrixXd& b_block, int p);

CompanionForm companion(const VarModel& model);
CompanionForm companion(std::span<const MatrixXd> coeffs);

/// Largest eigenvalue modulus. Throws ConvergenceError if the eigenvalue
/// iteration fails within `max_iter` sweeps per eigenvalue.
double spectral_radius(const MatrixXd& m, double tol = 1e-10,
                       int max_iter = 10000);

struct LyapunovOptions {
  double tol = 1e-10;
  int max_doublings = 100;
};

/// Gamma^(st)(0): solution of G = A G A^T + sigma_u by doubling.
/// Throws StabilityError when rho(a_stack) >= 1.
MatrixXd stacked_autocov0(const MatrixXd& a_stack, const MatrixXd& sigma_u,
                          const LyapunovOptions& opts = {});

/// Gamma^(st)(0) of a model with coefficients `coeffs` and innovation
/// covariance `sigma` (which need not be positive definite).
MatrixXd stacked_autocov0(std::span<const MatrixXd> coeffs,
                          const MatrixXd& sigma,
                          const LyapunovOptions& opts = {});

/// max-abs residual of the Lyapunov equation.
double lyapunov_residual(const MatrixXd& a_stack, const MatrixXd& sigma_u,
                         const MatrixXd& gamma);

/// Gamma(h) = E^T A^h Gamma^(st)(0) E, Gamma(-h) = Gamma(h)^T.
MatrixXd autocov(const VarModel& model, int h, double tol = 1e-10);

/// Characteristic polynomial A(z) = I - sum_s A_s z^s.
MatrixXcd characteristic(std::span<const MatrixXd> coeffs,
                         std::complex<double> z);

/// f(w) = (2 pi)^-1 A^-1(e^{-iw}) Sigma A^-1(e^{iw})^T.
MatrixXcd spectral_density(std::span<const MatrixXd> coeffs,
                           const MatrixXd& sigma, double omega);
MatrixXcd spectral_density(const VarModel& model, double omega);

/// f^-1(w) = 2 pi A(e^{iw})^T Sigma^-1 A(e^{-iw}); no inversion performed.
MatrixXcd inverse_spectral_density(std::span<const MatrixXd> coeffs,
                                   const MatrixXd& sigma_inv, double omega);

struct SimulatedPath {
  TimeSeries series;
  MatrixXd innovations;  // n x d, innovations of the returned rows
};

/// Gaussian simulation from a zero initial state. Deterministic in
/// (model, n, burn_in, seed).
SimulatedPath simulate_path(const VarModel& model, int n, int burn_in,
                            std::uint64_t seed);
TimeSeries simulate(const VarModel& model, int n, int burn_in = 500,
                    std::uint64_t seed = 0);
/// Same innovation stream as simulate_path, propagated through the
/// companion VAR(1); returns E^T W_t.
TimeSeries simulate_companion(const VarModel& model, int n, int burn_in,
                              std::uint64_t seed);

SampleDesign build_design(const TimeSeries& series, int p);

/// Iterated h-step forecast from the end of `series`.
VectorXd forecast(std::span<const MatrixXd> coeffs, const TimeSeries& series,
                  int h);

MembershipReport class_membership(std::span<const MatrixXd> coeffs,
                                  const SparsityClass& cls);

}  // namespace sparsevar
