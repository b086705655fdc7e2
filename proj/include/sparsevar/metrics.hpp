#pragma once

// Matrix norms, the four performance criteria and numerical checks of the
// autocovariance and inverse spectral density error bounds.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparsevar/var_model.hpp"

namespace sparsevar {

enum class NormKind { kOne, kInf, kMax, kTwo };

NormKind parse_norm_kind(const std::string& text);
std::string norm_name(NormKind kind);

double matrix_norm(const MatrixXd& m, NormKind kind);
double matrix_norm(const MatrixXcd& m, NormKind kind);

/// Pads coefficient lists with zero lags to a common order.
std::vector<MatrixXd> pad_lags(std::span<const MatrixXd> coeffs, int p);

/// ||A - A_hat||_inf on companion matrices.
double crit_param_error(const VarModel& truth, std::span<const MatrixXd> est);

/// Relative error of Gamma^(st)(0). +inf when the estimate is not stable.
double crit_gamma_error(const VarModel& truth, std::span<const MatrixXd> est,
                        const MatrixXd& est_sigma,
                        NormKind norm = NormKind::kInf);

/// Relative integrated spectral density error over n_freq Fourier
/// frequencies. +inf when the estimate is not stable.
double crit_spectral_error(const VarModel& truth,
                           std::span<const MatrixXd> est,
                           const MatrixXd& est_sigma,
                           NormKind norm = NormKind::kInf, int n_freq = 512);

/// Squared h-step forecast error divided by the innovation variances.
VectorXd scaled_forecast_error(const VarModel& truth,
                               std::span<const MatrixXd> est,
                               const TimeSeries& history,
                               const VectorXd& realized, int h);

using FitProcedure = std::function<std::vector<MatrixXd>(const TimeSeries&)>;

struct ForecastMse {
  VectorXd per_component;
  double average = 0.0;
  int replications = 0;
  int failures = 0;
};

/// Monte-Carlo estimate of MSE(X_hat_{n+h;j}) / sigma_j^2.
ForecastMse crit_forecast_mse(const VarModel& truth, const FitProcedure& fit,
                              int n, int h, int replications,
                              std::uint64_t seed, int burn_in = 500);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack = 1e-9) const { return lhs <= rhs + slack; }
};

/// sum_j ||m^j||^2 truncated once a term drops below `tol`; the tail is
/// bounded by the geometric factor 1 / (1 - last term).
double power_square_sum(const MatrixXd& m, NormKind norm, double tol = 1e-12,
                        long max_terms = 1000000);

/// ||Gamma_hat^(st)(h) - Gamma^(st)(h)|| against the autocovariance bound.
/// `norm` must be sub-multiplicative (one, inf, two).
BoundCheck autocov_bound_check(const VarModel& truth,
                               std::span<const MatrixXd> est,
                               const MatrixXd& est_sigma, int h,
                               NormKind norm);

/// max over frequencies of ||f^-1 - f_hat^-1|| / (2 pi) against the inverse
/// spectral density bound; norm is one, inf or two.
BoundCheck inverse_spectral_bound_check(std::span<const MatrixXd> coeffs,
                                        const MatrixXd& sigma_inv,
                                        std::span<const MatrixXd> est,
                                        const MatrixXd& est_sigma_inv,
                                        NormKind norm, int n_freq = 64);

}  // namespace sparsevar
