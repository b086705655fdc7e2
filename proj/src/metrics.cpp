#include "sparsevar/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparsevar/errors.hpp"
#include "sparsevar/seeding.hpp"

namespace sparsevar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Derived>
double norm_impl(const Eigen::MatrixBase<Derived>& m, NormKind kind) {
  if (m.size() == 0) return 0.0;
  const MatrixXd a = m.cwiseAbs();
  switch (kind) {
    case NormKind::kOne:
      return a.colwise().sum().maxCoeff();
    case NormKind::kInf:
      return a.rowwise().sum().maxCoeff();
    case NormKind::kMax:
      return a.maxCoeff();
    case NormKind::kTwo: {
      Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
      return svd.singularValues()(0);
    }
  }
  throw InternalError("matrix_norm: unknown kind");
}

void require_submultiplicative(NormKind norm, const char* who) {
  if (norm == NormKind::kMax) {
    throw ConfigError(std::string(who) + ": the max norm is not sub-multiplicative");
  }
}

void require_same_d(const VarModel& truth, std::span<const MatrixXd> est,
                    const char* who) {
  if (est.empty()) throw DimensionError(std::string(who) + ": no coefficient matrices");
  for (const auto& a : est) {
    if (a.rows() != truth.d() || a.cols() != truth.d()) {
      throw DimensionError(std::string(who) + ": estimate has shape " +
                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                           ", expected d = " + std::to_string(truth.d()));
    }
  }
}

bool stable(std::span<const MatrixXd> coeffs) {
  return spectral_radius(companion(coeffs).a_stack) < 1.0;
}

}  // namespace

NormKind parse_norm_kind(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "one" || t == "1" || t == "l1") return NormKind::kOne;
  if (t == "inf" || t == "infinity") return NormKind::kInf;
  if (t == "max") return NormKind::kMax;
  if (t == "two" || t == "2" || t == "spectral") return NormKind::kTwo;
  throw ConfigError("unknown norm '" + text + "' (expected one, inf, max or two)");
}

std::string norm_name(NormKind kind) {
  switch (kind) {
    case NormKind::kOne: return "one";
    case NormKind::kInf: return "inf";
    case NormKind::kMax: return "max";
    case NormKind::kTwo: return "two";
  }
  return "?";
}

double matrix_norm(const MatrixXd& m, NormKind kind) { return norm_impl(m, kind); }
double matrix_norm(const MatrixXcd& m, NormKind kind) { return norm_impl(m, kind); }

std::vector<MatrixXd> pad_lags(std::span<const MatrixXd> coeffs, int p) {
  if (coeffs.empty()) throw DimensionError("pad_lags: no coefficient matrices");
  if (static_cast<int>(coeffs.size()) > p) {
    throw DimensionError("pad_lags: order " + std::to_string(coeffs.size()) +
                         " exceeds target " + std::to_string(p));
  }
  std::vector<MatrixXd> out(coeffs.begin(), coeffs.end());
  out.resize(p, MatrixXd::Zero(coeffs.front().rows(), coeffs.front().cols()));
  return out;
}

double crit_param_error(const VarModel& truth, std::span<const MatrixXd> est) {
  require_same_d(truth, est, "crit_param_error");
  const int p = std::max<int>(truth.p(), est.size());
  const auto a = companion(pad_lags(truth.coeffs(), p)).a_stack;
  const auto a_hat = companion(pad_lags(est, p)).a_stack;
  return matrix_norm(MatrixXd(a - a_hat), NormKind::kInf);
}

double crit_gamma_error(const VarModel& truth, std::span<const MatrixXd> est,
                        const MatrixXd& est_sigma, NormKind norm) {
  require_same_d(truth, est, "crit_gamma_error");
  const int p = std::max<int>(truth.p(), est.size());
  const auto est_p = pad_lags(est, p);
  if (!stable(est_p)) return kInf;
  const MatrixXd g = stacked_autocov0(pad_lags(truth.coeffs(), p), truth.sigma());
  MatrixXd g_hat;
  try {
    g_hat = stacked_autocov0(est_p, est_sigma);
  } catch (const NumericError&) {
    return kInf;
  }
  return matrix_norm(MatrixXd(g_hat - g), norm) / matrix_norm(g, norm);
}

double crit_spectral_error(const VarModel& truth, std::span<const MatrixXd> est,
                           const MatrixXd& est_sigma, NormKind norm,
                           int n_freq) {
  require_same_d(truth, est, "crit_spectral_error");
  if (n_freq < 1) throw ConfigError("crit_spectral_error: n_freq must be positive");
  if (!stable(est)) return kInf;
  double num = 0.0, den = 0.0;
  const int lo = -(n_freq / 2);
  const int hi = (n_freq + 1) / 2;
  try {
    for (int k = lo; k < hi; ++k) {
      const double w = 2.0 * std::numbers::pi * k / n_freq;
      const MatrixXcd f = spectral_density(truth.coeffs(), truth.sigma(), w);
      const MatrixXcd f_hat = spectral_density(est, est_sigma, w);
      num += matrix_norm(MatrixXcd(f - f_hat), norm);
      den += matrix_norm(f, norm);
    }
  } catch (const NumericError&) {
    return kInf;
  }
  return num / den;
}

VectorXd scaled_forecast_error(const VarModel& truth,
                               std::span<const MatrixXd> est,
                               const TimeSeries& history,
                               const VectorXd& realized, int h) {
  require_same_d(truth, est, "scaled_forecast_error");
  const VectorXd err = forecast(est, history, h) - realized;
  return err.array().square() / truth.sigma().diagonal().array();
}

ForecastMse crit_forecast_mse(const VarModel& truth, const FitProcedure& fit,
                              int n, int h, int replications,
                              std::uint64_t seed, int burn_in) {
  if (replications < 1) throw ConfigError("crit_forecast_mse: replications must be >= 1");
  if (h < 1) throw ConfigError("crit_forecast_mse: horizon must be >= 1");
  ForecastMse out;
  out.per_component = VectorXd::Zero(truth.d());
  for (int r = 0; r < replications; ++r) {
    const TimeSeries full = simulate(truth, n + h, burn_in, derive_seed(seed, r));
    const TimeSeries history(full.values().topRows(n));
    const VectorXd realized = full.values().row(n + h - 1).transpose();
    try {
      const auto est = fit(history);
      out.per_component += scaled_forecast_error(truth, est, history, realized, h);
      ++out.replications;
    } catch (const Error&) {
      ++out.failures;
    }
  }
  if (out.replications > 0) out.per_component /= out.replications;
  out.average = out.replications > 0 ? out.per_component.mean() : kInf;
  return out;
}

double power_square_sum(const MatrixXd& m, NormKind norm, double tol,
                        long max_terms) {
  require_submultiplicative(norm, "power_square_sum");
  MatrixXd power = MatrixXd::Identity(m.rows(), m.cols());
  double sum = 0.0;
  for (long j = 0; j < max_terms; ++j) {
    const double nrm = matrix_norm(power, norm);
    const double term = nrm * nrm;
    sum += term;
    // every later term is at most term * (sum of the series), so the tail
    // is bounded by term / (1 - term) times the series
    if (j > 0 && term < tol) return sum / (1.0 - term);
    power = m * power;
  }
  throw ConvergenceError("power_square_sum: series did not converge", power, max_terms);
}

BoundCheck autocov_bound_check(const VarModel& truth,
                               std::span<const MatrixXd> est,
                               const MatrixXd& est_sigma, int h,
                               NormKind norm) {
  require_submultiplicative(norm, "autocov_bound_check");
  require_same_d(truth, est, "autocov_bound_check");
  if (h < 0) throw ConfigError("autocov_bound_check: h must be >= 0");
  const int p = std::max<int>(truth.p(), est.size());
  const CompanionForm cf = companion(pad_lags(truth.coeffs(), p));
  const CompanionForm cf_hat = companion(pad_lags(est, p));
  const MatrixXd& a = cf.a_stack;
  const MatrixXd& a_hat = cf_hat.a_stack;

  const MatrixXd sigma_u = cf.embed * truth.sigma() * cf.embed.transpose();
  const MatrixXd sigma_u_hat = cf.embed * est_sigma * cf.embed.transpose();
  const MatrixXd g0 = stacked_autocov0(a, sigma_u);
  const MatrixXd g0_hat = stacked_autocov0(a_hat, sigma_u_hat);
  MatrixXd a_h = MatrixXd::Identity(a.rows(), a.cols());
  MatrixXd a_hat_h = a_h;
  for (int k = 0; k < h; ++k) {
    a_h = a * a_h;
    a_hat_h = a_hat * a_hat_h;
  }

  BoundCheck out;
  out.lhs = matrix_norm(MatrixXd(a_hat_h * g0_hat - a_h * g0), norm);

  const double c_a = power_square_sum(a, norm);
  const double c_at = power_square_sum(a.transpose(), norm);
  const double c_ah = power_square_sum(a_hat, norm);
  const double c_aht = power_square_sum(a_hat.transpose(), norm);
  const double c_sig = matrix_norm(truth.sigma(), norm);
  const double d_a = matrix_norm(MatrixXd(a_hat - a), norm);
  const double d_at = matrix_norm(MatrixXd((a_hat - a).transpose()), norm);
  const double d_sig = matrix_norm(MatrixXd(est_sigma - truth.sigma()), norm);

  const double b0 = d_a * c_sig * (c_ah + c_at) * (c_a + c_at) / 4.0 +
                    d_sig * (c_ah + c_at) / 2.0 +
                    d_at * (c_sig + d_sig) * (c_ah + c_at) * (c_ah + c_aht) / 4.0;
  out.rhs = matrix_norm(a_hat_h, norm) * b0;
  if (h != 0) out.rhs += d_a * (c_ah + c_a) * matrix_norm(g0, norm);
  return out;
}

BoundCheck inverse_spectral_bound_check(std::span<const MatrixXd> coeffs,
                                        const MatrixXd& sigma_inv,
                                        std::span<const MatrixXd> est,
                                        const MatrixXd& est_sigma_inv,
                                        NormKind norm, int n_freq) {
  require_submultiplicative(norm, "inverse_spectral_bound_check");
  if (coeffs.empty() || est.empty()) {
    throw DimensionError("inverse_spectral_bound_check: no coefficient matrices");
  }
  const int p = std::max<int>(coeffs.size(), est.size());
  const auto a = pad_lags(coeffs, p);
  const auto a_hat = pad_lags(est, p);

  double sum_a = 0.0, sum_at = 0.0, t1 = 0.0, t1t = 0.0;
  for (int s = 0; s < p; ++s) {
    sum_a += matrix_norm(a[s], norm);
    sum_at += matrix_norm(MatrixXd(a[s].transpose()), norm);
    const MatrixXd diff = a_hat[s] - a[s];
    t1 += matrix_norm(diff, norm);
    t1t += matrix_norm(MatrixXd(diff.transpose()), norm);
  }
  const double m_a = 1.0 + std::max(sum_a, sum_at);
  t1 = std::max(t1, t1t);
  const double m_eps = matrix_norm(sigma_inv, norm);
  const double t2 = matrix_norm(MatrixXd(est_sigma_inv - sigma_inv), norm);

  BoundCheck out;
  out.rhs = 2 * m_a * m_eps * t1 + m_a * m_a * t2 + 2 * m_a * t1 * t2 +
            t1 * t1 * m_eps + t1 * t1 * t2;
  for (int k = 0; k < n_freq; ++k) {
    const double w = -std::numbers::pi + 2.0 * std::numbers::pi * k / n_freq;
    const MatrixXcd diff = inverse_spectral_density(a, sigma_inv, w) -
                           inverse_spectral_density(a_hat, est_sigma_inv, w);
    out.lhs = std::max(out.lhs, matrix_norm(diff, norm) / (2.0 * std::numbers::pi));
  }
  return out;
}

}  // namespace sparsevar
