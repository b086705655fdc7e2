#include "sparsevar/var_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sparsevar/errors.hpp"

namespace sparsevar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

std::string shape(const MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

// |a|^q with 0^0 := 0, so that q = 0 counts nonzeros.
double q_power(double a, double q) {
  if (a == 0.0) return 0.0;
  return q == 0.0 ? 1.0 : std::pow(std::abs(a), q);
}

}  // namespace

VarModel::VarModel(std::vector<MatrixXd> coeffs, MatrixXd sigma)
    : coeffs_(std::move(coeffs)), sigma_(std::move(sigma)) {
  if (coeffs_.empty()) throw DimensionError("VarModel: lag order must be >= 1");
  const auto d = sigma_.rows();
  if (d < 1 || sigma_.cols() != d) {
    throw DimensionError("VarModel: sigma must be square, got " + shape(sigma_));
  }
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k].rows() != d || coeffs_[k].cols() != d) {
      throw DimensionError("VarModel: A" + std::to_string(k + 1) + " is " +
                           shape(coeffs_[k]) + ", expected " + shape(sigma_));
    }
    if (!all_finite(coeffs_[k])) {
      throw DataError("VarModel: A" + std::to_string(k + 1) +
                      " has non-finite entries");
    }
  }
  if (!all_finite(sigma_)) throw DataError("VarModel: sigma not finite");
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw DataError("VarModel: sigma is not symmetric");
  }
  if ((sigma_.diagonal().array() <= 0.0).any()) {
    throw DataError("VarModel: sigma must have a positive diagonal");
  }
}

TimeSeries::TimeSeries(MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DataError("TimeSeries: empty series");
  }
  if (!values_.allFinite()) {
    throw DataError("TimeSeries: series contains non-finite values");
  }
}

void SparsityClass::validate() const {
  if (variant != 1 && variant != 2) {
    throw ConfigError("SparsityClass: variant must be 1 or 2");
  }
  if (!(q >= 0.0 && q < 1.0)) throw ConfigError("SparsityClass: q not in [0,1)");
  if (!(s > 0.0)) throw ConfigError("SparsityClass: s must be positive");
  if (!(m_bound > 0.0)) throw ConfigError("SparsityClass: M must be positive");
  if (p < 1) throw ConfigError("SparsityClass: p must be >= 1");
}

MatrixXd stack_coefficients(std::span<const MatrixXd> coeffs) {
  const auto p = static_cast<Eigen::Index>(coeffs.size());
  const auto d = coeffs.front().rows();
  MatrixXd b(d * p, d);
  for (Eigen::Index k = 0; k < p; ++k) {
    b.middleRows(k * d, d) = coeffs[k].transpose();
  }
  return b;
}

std::vector<MatrixXd> unstack_coefficients(const MatrixXd& b_block, int p) {
  const auto d = b_block.cols();
  if (b_block.rows() != d * p) {
    throw DimensionError("unstack_coefficients: block is " + shape(b_block) +
                         ", expected dp x d");
  }
  std::vector<MatrixXd> out;
  out.reserve(p);
  for (int k = 0; k < p; ++k) {
    out.emplace_back(b_block.middleRows(k * d, d).transpose());
  }
  return out;
}

CompanionForm companion(std::span<const MatrixXd> coeffs) {
  const auto p = static_cast<Eigen::Index>(coeffs.size());
  const auto d = coeffs.front().rows();
  CompanionForm cf;
  cf.dp = static_cast<int>(d * p);
  cf.a_stack = MatrixXd::Zero(d * p, d * p);
  for (Eigen::Index k = 0; k < p; ++k) {
    cf.a_stack.block(0, k * d, d, d) = coeffs[k];
  }
  if (p > 1) {
    cf.a_stack.block(d, 0, d * (p - 1), d * (p - 1)).setIdentity();
  }
  cf.embed = MatrixXd::Zero(d * p, d);
  cf.embed.topRows(d).setIdentity();
  return cf;
}

CompanionForm companion(const VarModel& model) {
  return companion(std::span<const MatrixXd>(model.coeffs()));
}

double spectral_radius(const MatrixXd& m, double /*tol*/, int max_iter) {
  if (m.rows() != m.cols()) {
    throw DimensionError("spectral_radius: matrix is " + shape(m));
  }
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw DataError("spectral_radius: non-finite entries");
  // Francis QR on the Hessenberg form; deflation is at machine precision,
  // which is tighter than any tolerance a caller can request.
  Eigen::EigenSolver<MatrixXd> solver;
  solver.setMaxIterations(max_iter);
  solver.compute(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("spectral_radius: eigenvalue iteration did not "
                           "converge",
                           solver.pseudoEigenvalueMatrix(), max_iter);
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd stacked_autocov0(const MatrixXd& a_stack, const MatrixXd& sigma_u,
                          const LyapunovOptions& opts) {
  const double rho = spectral_radius(a_stack);
  if (!(rho < 1.0)) {
    throw StabilityError("autocovariance requires a stable model, rho = " +
                             std::to_string(rho),
                         rho);
  }
  MatrixXd gamma = sigma_u;
  MatrixXd power = a_stack;
  for (int k = 0; k < opts.max_doublings; ++k) {
    const MatrixXd increment = power * gamma * power.transpose();
    gamma += increment;
    const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
    if (increment.cwiseAbs().maxCoeff() <= opts.tol * scale) {
      return 0.5 * (gamma + gamma.transpose());
    }
    power = power * power;
  }
  throw ConvergenceError("stacked_autocov0: doubling did not converge", gamma,
                         opts.max_doublings);
}

MatrixXd stacked_autocov0(std::span<const MatrixXd> coeffs,
                          const MatrixXd& sigma, const LyapunovOptions& opts) {
  const CompanionForm cf = companion(coeffs);
  return stacked_autocov0(cf.a_stack, cf.embed * sigma * cf.embed.transpose(),
                          opts);
}

double lyapunov_residual(const MatrixXd& a_stack, const MatrixXd& sigma_u,
                         const MatrixXd& gamma) {
  return (gamma - a_stack * gamma * a_stack.transpose() - sigma_u)
      .cwiseAbs()
      .maxCoeff();
}

MatrixXd autocov(const VarModel& model, int h, double tol) {
  const CompanionForm cf = companion(model);
  LyapunovOptions opts;
  opts.tol = tol;
  const MatrixXd g0 = stacked_autocov0(
      cf.a_stack, cf.embed * model.sigma() * cf.embed.transpose(), opts);
  const int lag = std::abs(h);
  MatrixXd gh = g0;
  for (int i = 0; i < lag; ++i) gh = cf.a_stack * gh;
  MatrixXd out = cf.embed.transpose() * gh * cf.embed;
  if (h < 0) out.transposeInPlace();
  return out;
}

MatrixXcd characteristic(std::span<const MatrixXd> coeffs,
                         std::complex<double> z) {
  const auto d = coeffs.front().rows();
  MatrixXcd out = MatrixXcd::Identity(d, d);
  std::complex<double> zs = 1.0;
  for (const auto& a : coeffs) {
    zs *= z;
    out -= zs * a.cast<std::complex<double>>();
  }
  return out;
}

MatrixXcd spectral_density(std::span<const MatrixXd> coeffs,
                           const MatrixXd& sigma, double omega) {
  const MatrixXcd a_minus =
      characteristic(coeffs, std::polar(1.0, -omega));
  Eigen::PartialPivLU<MatrixXcd> lu(a_minus);
  if (!(lu.rcond() > 1e-13)) {
    throw SingularityError("spectral_density: A(exp(-i w)) is singular at w = " +
                           std::to_string(omega));
  }
  // A(e^{iw}) = conj(A(e^{-iw})) for real coefficients, so
  // (A^-1(e^{iw}))^T = A^-1(e^{-iw})^H.
  const MatrixXcd left = lu.solve(sigma.cast<std::complex<double>>());
  MatrixXcd f = lu.solve(MatrixXcd(left.adjoint())).adjoint();
  return f / kTwoPi;
}

MatrixXcd spectral_density(const VarModel& model, double omega) {
  return spectral_density(std::span<const MatrixXd>(model.coeffs()),
                          model.sigma(), omega);
}

MatrixXcd inverse_spectral_density(std::span<const MatrixXd> coeffs,
                                   const MatrixXd& sigma_inv, double omega) {
  const auto d = coeffs.front().rows();
  if (sigma_inv.rows() != d || sigma_inv.cols() != d) {
    throw DimensionError("inverse_spectral_density: sigma_inv is " +
                         shape(sigma_inv));
  }
  const MatrixXcd a_plus = characteristic(coeffs, std::polar(1.0, omega));
  const MatrixXcd a_minus = characteristic(coeffs, std::polar(1.0, -omega));
  return kTwoPi *
         (a_plus.transpose() * sigma_inv.cast<std::complex<double>>() *
          a_minus);
}

namespace {

MatrixXd cholesky_factor(const MatrixXd& sigma) {
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError("simulate: sigma is not positive definite");
  }
  return llt.matrixL();
}

// burn_in + n innovations drawn from one seeded stream.
MatrixXd draw_innovations(const MatrixXd& chol, int total, std::uint64_t seed) {
  const auto d = chol.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd eps(total, d);
  VectorXd z(d);
  for (int t = 0; t < total; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng);
    eps.row(t) = (chol * z).transpose();
  }
  return eps;
}

void check_sim_args(const VarModel& model, int n, int burn_in) {
  if (n < 1) throw DataError("simulate: n must be >= 1");
  if (burn_in < 0) throw DataError("simulate: burn_in must be >= 0");
  const double rho = spectral_radius(companion(model).a_stack);
  if (!(rho < 1.0)) {
    throw StabilityError("simulate: model is not stable", rho);
  }
}

}  // namespace

SimulatedPath simulate_path(const VarModel& model, int n, int burn_in,
                            std::uint64_t seed) {
  check_sim_args(model, n, burn_in);
  const int d = model.d();
  const int p = model.p();
  const int total = burn_in + n;
  const MatrixXd eps = draw_innovations(cholesky_factor(model.sigma()), total,
                                        seed);
  MatrixXd x = MatrixXd::Zero(total, d);
  for (int t = 0; t < total; ++t) {
    for (int r = 0; r < d; ++r) {
      double acc = 0.0;
      for (int k = 0; k < p; ++k) {
        const int src = t - 1 - k;
        const MatrixXd& a = model.coeffs()[k];
        for (int i = 0; i < d; ++i) {
          acc += a(r, i) * (src >= 0 ? x(src, i) : 0.0);
        }
      }
      x(t, r) = acc + eps(t, r);
    }
  }
  return SimulatedPath{TimeSeries(x.bottomRows(n)), eps.bottomRows(n)};
}

TimeSeries simulate(const VarModel& model, int n, int burn_in,
                    std::uint64_t seed) {
  return simulate_path(model, n, burn_in, seed).series;
}

TimeSeries simulate_companion(const VarModel& model, int n, int burn_in,
                              std::uint64_t seed) {
  check_sim_args(model, n, burn_in);
  const CompanionForm cf = companion(model);
  const int d = model.d();
  const int dp = cf.dp;
  const int total = burn_in + n;
  const MatrixXd eps = draw_innovations(cholesky_factor(model.sigma()), total,
                                        seed);
  VectorXd w = VectorXd::Zero(dp);
  VectorXd next(dp);
  MatrixXd out(n, d);
  for (int t = 0; t < total; ++t) {
    for (int r = 0; r < dp; ++r) {
      double acc = 0.0;
      for (int c = 0; c < dp; ++c) acc += cf.a_stack(r, c) * w(c);
      next(r) = acc + (r < d ? eps(t, r) : 0.0);
    }
    w.swap(next);
    if (t >= burn_in) out.row(t - burn_in) = (cf.embed.transpose() * w).transpose();
  }
  return TimeSeries(out);
}

SampleDesign build_design(const TimeSeries& series, int p) {
  if (p < 1) throw DataError("build_design: p must be >= 1");
  const int n = series.n();
  const int d = series.d();
  if (n <= p) {
    throw InsufficientDataError("build_design: need n > p, got n = " +
                                std::to_string(n) + ", p = " +
                                std::to_string(p));
  }
  const MatrixXd& x = series.values();
  SampleDesign des;
  des.n_eff = n - p;
  des.p = p;
  des.d = d;
  des.y_mat.resize(des.n_eff, d);
  des.x_mat.resize(des.n_eff, static_cast<Eigen::Index>(d) * p);
  for (int k = 0; k < des.n_eff; ++k) {
    const int t = n - 1 - k;  // 0-based index of X_{n-k}
    des.y_mat.row(k) = x.row(t);
    for (int lag = 1; lag <= p; ++lag) {
      des.x_mat.block(k, static_cast<Eigen::Index>(lag - 1) * d, 1, d) =
          x.row(t - lag);
    }
  }
  return des;
}

VectorXd forecast(std::span<const MatrixXd> coeffs, const TimeSeries& series,
                  int h) {
  if (h < 1) throw DataError("forecast: horizon must be >= 1");
  const int p = static_cast<int>(coeffs.size());
  const int n = series.n();
  if (n < p) throw InsufficientDataError("forecast: series shorter than p");
  const int d = series.d();
  if (coeffs.front().rows() != d) {
    throw DimensionError("forecast: coefficient dimension mismatch");
  }
  // path holds the last p observations followed by the forecasts.
  MatrixXd path(p + h, d);
  path.topRows(p) = series.values().bottomRows(p);
  for (int k = 0; k < h; ++k) {
    VectorXd next = VectorXd::Zero(d);
    for (int s = 1; s <= p; ++s) {
      next += coeffs[s - 1] * path.row(p + k - s).transpose();
    }
    path.row(p + k) = next.transpose();
  }
  return path.row(p + h - 1).transpose();
}

MembershipReport class_membership(std::span<const MatrixXd> coeffs,
                                  const SparsityClass& cls) {
  cls.validate();
  const int p = static_cast<int>(coeffs.size());
  const auto d = coeffs.front().rows();
  const auto qsum = [&](auto&& block) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < block.size(); ++i) {
      acc += q_power(block(i), cls.q);
    }
    return acc;
  };

  MembershipReport rep;
  const auto check = [&](const char* name, double lhs, double rhs) {
    if (rep.member && !(lhs <= rhs)) {
      rep.member = false;
      rep.violated = name;
      rep.lhs = lhs;
      rep.rhs = rhs;
    }
  };

  double row_budget = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int k = 0; k < p; ++k) acc += qsum(coeffs[k].row(i));
    row_budget = std::max(row_budget, acc);
  }
  double col_budget = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    double across = 0.0;
    for (int k = 0; k < p; ++k) {
      const double per_lag = qsum(coeffs[k].col(j));
      across += per_lag;
      if (cls.variant == 1) col_budget = std::max(col_budget, per_lag);
    }
    if (cls.variant == 2) col_budget = std::max(col_budget, across);
  }
  double inf_sum = 0.0;
  double one_agg = 0.0;
  for (int k = 0; k < p; ++k) {
    inf_sum += coeffs[k].cwiseAbs().rowwise().sum().maxCoeff();
    const double one = coeffs[k].cwiseAbs().colwise().sum().maxCoeff();
    one_agg = cls.variant == 1 ? std::max(one_agg, one) : one_agg + one;
  }

  check("row-budget", row_budget, cls.s);
  check("column-budget", col_budget, cls.s);
  check("row-norm", inf_sum, cls.m_bound);
  check("column-norm", one_agg, cls.m_bound);
  return rep;
}

}  // namespace sparsevar
