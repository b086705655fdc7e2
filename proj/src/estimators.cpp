#include "sparsevar/estimators.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "sparsevar/errors.hpp"
#include "sparsevar/linear_program.hpp"

namespace sparsevar {

namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

void check_weights(const VectorXd& w, Eigen::Index k) {
  if (w.size() != k) throw DimensionError("penalty weights have wrong length");
  if (!w.allFinite() || (w.array() < 0).any()) {
    throw DataError("penalty weights must be finite and nonnegative");
  }
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DataError("lambda must be finite and nonnegative");
  }
}

// dense reduced solves cost m^3; larger supports are left to the sweeps
constexpr Eigen::Index kMaxPolishSupport = 150;

// Subgradient violation of a single coordinate given gradient term r.
double kkt_term(double r, double thr, double beta) {
  if (beta == 0.0) return std::max(0.0, std::abs(r) - thr);
  return std::abs(r - std::copysign(thr, beta));
}

}  // namespace

Moments compute_moments(const SampleDesign& design) {
  Moments m;
  m.n_eff = design.n_eff;
  const double inv_n = 1.0 / design.n_eff;
  m.gram = design.x_mat.transpose() * design.x_mat * inv_n;
  m.xty = design.x_mat.transpose() * design.y_mat * inv_n;
  return m;
}

double lasso_kkt_violation(const Moments& mom, int j, double lambda,
                           const VectorXd& weights, const VectorXd& beta) {
  const VectorXd r = mom.xty.col(j) - mom.gram * beta;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    worst = std::max(worst, kkt_term(r(i), lambda * weights(i), beta(i)));
  }
  return worst;
}

VectorXd lasso_row(const Moments& mom, int j, double lambda,
                   const VectorXd& weights, const CdOptions& opts,
                   const VectorXd* warm) {
  const Eigen::Index k = mom.gram.rows();
  if (j < 0 || j >= mom.xty.cols()) throw DimensionError("lasso_row: bad row");
  check_weights(weights, k);
  check_lambda(lambda);
  const MatrixXd& g = mom.gram;
  VectorXd beta = warm ? *warm : VectorXd::Zero(k);
  VectorXd r = mom.xty.col(j) - g * beta;
  std::vector<char> active(k, 0);
  long sweeps = 0;

  const auto sweep = [&](bool active_only) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (active_only && !active[i]) continue;
      const double gii = g(i, i);
      if (gii <= 0.0) continue;
      const double old = beta(i);
      const double fresh = soft(r(i) + gii * old, lambda * weights(i)) / gii;
      const double delta = fresh - old;
      if (delta != 0.0) {
        beta(i) = fresh;
        r.noalias() -= delta * g.col(i);
        max_change = std::max(max_change, std::abs(delta));
      }
      if (fresh != 0.0) active[i] = 1;
    }
    ++sweeps;
    return max_change;
  };

  // Feature-sign descent: moves toward the minimizer of the quadratic with
  // the current support and signs, dropping a coordinate at each sign
  // crossing. Returns true once that minimizer carries a KKT certificate;
  // otherwise beta is left at the improved point for further sweeps.
  const auto polish = [&]() {
    for (int step = 0; step < 8; ++step) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (beta(i) != 0.0) idx.push_back(i);
      }
      if (idx.empty()) return false;
      const auto m = static_cast<Eigen::Index>(idx.size());
      MatrixXd ga(m, m);
      VectorXd rhs(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) ga(a, b) = g(idx[a], idx[b]);
        rhs(a) = mom.xty(idx[a], j) -
                 lambda * weights(idx[a]) * std::copysign(1.0, beta(idx[a]));
      }
      const Eigen::LDLT<MatrixXd> ldlt(ga);
      if (ldlt.info() != Eigen::Success) return false;
      const VectorXd sol = ldlt.solve(rhs);
      if (!sol.allFinite()) return false;
      double t = 1.0;
      Eigen::Index cross = -1;
      for (Eigen::Index a = 0; a < m; ++a) {
        const double from = beta(idx[a]);
        if (weights(idx[a]) > 0.0 && (sol(a) > 0.0) != (from > 0.0)) {
          const double at = from / (from - sol(a));
          if (at < t) {
            t = at;
            cross = a;
          }
        }
      }
      for (Eigen::Index a = 0; a < m; ++a) {
        beta(idx[a]) += t * (sol(a) - beta(idx[a]));
      }
      if (cross >= 0) {
        beta(idx[cross]) = 0.0;
        continue;
      }
      r = mom.xty.col(j) - g * beta;
      return lasso_kkt_violation(mom, j, lambda, weights, beta) <= opts.kkt_tol;
    }
    r = mom.xty.col(j) - g * beta;
    return false;
  };

  // attempts back off geometrically while they keep failing
  long next_polish = 10;
  long gap = 10;
  const auto try_polish = [&]() {
    if (sweeps < next_polish) return false;
    if (polish()) return true;
    gap *= 2;
    next_polish = sweeps + gap;
    return false;
  };

  double tol = opts.tol;
  for (int attempt = 0; attempt < 4; ++attempt) {
    for (;;) {
      if (sweeps >= opts.max_iter) {
        throw ConvergenceError("lasso_row: sweep limit reached", beta, sweeps);
      }
      if (sweep(false) < tol) break;
      if (try_polish()) return beta;
      while (sweeps < opts.max_iter && sweep(true) >= tol) {
        if (try_polish()) return beta;
      }
    }
    r = mom.xty.col(j) - g * beta;
    if (lasso_kkt_violation(mom, j, lambda, weights, beta) <= opts.kkt_tol) {
      return beta;
    }
    tol *= 1e-2;
  }
  throw ConvergenceError("lasso_row: KKT certificate not reached", beta,
                         sweeps);
}

VectorXd lasso_row(const SampleDesign& design, int j, double lambda,
                   const VectorXd& weights, const CdOptions& opts) {
  return lasso_row(compute_moments(design), j, lambda, weights, opts);
}

double lasso_vec_kkt_violation(const Moments& mom, const MatrixXd& omega,
                               double lambda, const MatrixXd& weights,
                               const MatrixXd& b) {
  const MatrixXd s = (mom.xty - mom.gram * b) * omega;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      worst = std::max(worst,
                       kkt_term(s(i, j), lambda * weights(i, j), b(i, j)));
    }
  }
  return worst;
}

MatrixXd lasso_vec(const Moments& mom, const MatrixXd& omega, double lambda,
                   const MatrixXd& weights, const CdOptions& opts,
                   const MatrixXd* warm) {
  const Eigen::Index k = mom.gram.rows();
  const Eigen::Index d = mom.xty.cols();
  if (omega.rows() != d || omega.cols() != d) {
    throw DimensionError("lasso_vec: weighting matrix has wrong shape");
  }
  if (!omega.allFinite()) throw NumericError("lasso_vec: non-finite weighting");
  if ((omega.diagonal().array() <= 0).any()) {
    throw NumericError("lasso_vec: weighting matrix is not positive definite");
  }
  if (weights.rows() != k || weights.cols() != d || !weights.allFinite() ||
      (weights.array() < 0).any()) {
    throw DataError("lasso_vec: invalid penalty weights");
  }
  check_lambda(lambda);
  const MatrixXd& g = mom.gram;
  MatrixXd b = warm ? *warm : MatrixXd::Zero(k, d);
  MatrixXd s = (mom.xty - g * b) * omega;
  std::vector<char> active(k * d, 0);
  long sweeps = 0;

  const auto sweep = [&](bool active_only) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double ojj = omega(j, j);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (active_only && !active[j * k + i]) continue;
        const double a = g(i, i) * ojj;
        if (a <= 0.0) continue;
        const double old = b(i, j);
        const double fresh =
            soft(s(i, j) + a * old, lambda * weights(i, j)) / a;
        const double delta = fresh - old;
        if (delta != 0.0) {
          b(i, j) = fresh;
          s.noalias() -= delta * g.col(i) * omega.row(j);
          max_change = std::max(max_change, std::abs(delta));
        }
        if (fresh != 0.0) active[j * k + i] = 1;
      }
    }
    ++sweeps;
    return max_change;
  };

  // Feature-sign descent on the support of b, as in lasso_row; the Hessian
  // restricted to the support is G_ii' * omega_jj'.
  const MatrixXd c = mom.xty * omega;
  const auto polish = [&]() {
    for (int step = 0; step < 8; ++step) {
      std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
          if (b(i, j) != 0.0) idx.emplace_back(i, j);
        }
      }
      if (idx.empty() || static_cast<Eigen::Index>(idx.size()) > kMaxPolishSupport) {
        return false;
      }
      const auto m = static_cast<Eigen::Index>(idx.size());
      MatrixXd h(m, m);
      VectorXd rhs(m);
      for (Eigen::Index u = 0; u < m; ++u) {
        const auto [i, j] = idx[u];
        for (Eigen::Index v = 0; v < m; ++v) {
          h(u, v) = g(i, idx[v].first) * omega(idx[v].second, j);
        }
        rhs(u) = c(i, j) - lambda * weights(i, j) * std::copysign(1.0, b(i, j));
      }
      const Eigen::LDLT<MatrixXd> ldlt(h);
      if (ldlt.info() != Eigen::Success) return false;
      const VectorXd sol = ldlt.solve(rhs);
      if (!sol.allFinite()) return false;
      double t = 1.0;
      Eigen::Index cross = -1;
      for (Eigen::Index u = 0; u < m; ++u) {
        const double from = b(idx[u].first, idx[u].second);
        if (weights(idx[u].first, idx[u].second) > 0.0 &&
            (sol(u) > 0.0) != (from > 0.0)) {
          const double at = from / (from - sol(u));
          if (at < t) {
            t = at;
            cross = u;
          }
        }
      }
      for (Eigen::Index u = 0; u < m; ++u) {
        double& x = b(idx[u].first, idx[u].second);
        x += t * (sol(u) - x);
      }
      if (cross >= 0) {
        b(idx[cross].first, idx[cross].second) = 0.0;
        continue;
      }
      s = (mom.xty - g * b) * omega;
      return lasso_vec_kkt_violation(mom, omega, lambda, weights, b) <=
             opts.kkt_tol;
    }
    s = (mom.xty - g * b) * omega;
    return false;
  };

  // attempts back off geometrically while they keep failing
  long next_polish = 10;
  long gap = 10;
  const auto try_polish = [&]() {
    if (sweeps < next_polish) return false;
    if (polish()) return true;
    gap *= 2;
    next_polish = sweeps + gap;
    return false;
  };

  double tol = opts.tol;
  for (int attempt = 0; attempt < 4; ++attempt) {
    for (;;) {
      if (sweeps >= opts.max_iter) {
        throw ConvergenceError("lasso_vec: sweep limit reached", b, sweeps);
      }
      if (sweep(false) < tol) break;
      if (try_polish()) return b;
      while (sweeps < opts.max_iter && sweep(true) >= tol) {
        if (try_polish()) return b;
      }
    }
    s = (mom.xty - g * b) * omega;
    if (lasso_vec_kkt_violation(mom, omega, lambda, weights, b) <=
        opts.kkt_tol) {
      return b;
    }
    tol *= 1e-2;
  }
  throw ConvergenceError("lasso_vec: KKT certificate not reached", b, sweeps);
}

VectorXd dantzig_lp(const MatrixXd& gram, const VectorXd& rhs, double lambda,
                    const VectorXd& weights) {
  const Eigen::Index k = gram.cols();
  if (gram.rows() != rhs.size()) {
    throw DimensionError("dantzig_lp: Gram and right-hand side disagree");
  }
  check_weights(weights, k);
  check_lambda(lambda);
  const double scale = gram.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    if (rhs.cwiseAbs().maxCoeff() <= lambda) return VectorXd::Zero(k);
    throw LpInfeasibleError("dantzig_lp: zero Gram matrix, constraint unmet");
  }
  const Eigen::Index m = gram.rows();
  LpProblem lp;
  lp.c.resize(2 * k);
  lp.c << weights, weights;
  lp.g_mat.resize(2 * m, 2 * k);
  const MatrixXd gs = gram / scale;
  lp.g_mat << gs, -gs, -gs, gs;
  const VectorXd bs = rhs / scale;
  const double ls = lambda / scale;
  lp.g_rhs.resize(2 * m);
  lp.g_rhs << (bs.array() + ls).matrix(), (ls - bs.array()).matrix();
  try {
    const LpSolution sol = lp_solve(lp);
    return sol.x.head(k) - sol.x.tail(k);
  } catch (const LpInfeasibleError& e) {
    if (lambda > 0.0) {
      throw InternalError(std::string("dantzig_lp: infeasible at lambda > 0: ") +
                          e.what());
    }
    throw;
  }
}

VectorXd dantzig_row(const Moments& mom, int j, double lambda,
                     const VectorXd& weights) {
  if (j < 0 || j >= mom.xty.cols()) throw DimensionError("dantzig_row: bad row");
  return dantzig_lp(mom.gram, mom.xty.col(j), lambda, weights);
}

VectorXd dantzig_row(const SampleDesign& design, int j, double lambda,
                     const VectorXd& weights) {
  return dantzig_row(compute_moments(design), j, lambda, weights);
}

StandardizedDesign standardize(const SampleDesign& design,
                               const TimeSeries& series) {
  const int d = series.d();
  if (design.d != d) throw DimensionError("standardize: dimension mismatch");
  if (series.n() < 2) throw InsufficientDataError("standardize: n < 2");
  const MatrixXd& x = series.values();
  VectorXd scale(d);
  for (int j = 0; j < d; ++j) {
    const double mean = x.col(j).mean();
    const double var =
        (x.col(j).array() - mean).square().sum() / (series.n() - 1);
    if (!(var > 0.0)) {
      throw DegenerateInputError(
          "standardize: component x" + std::to_string(j + 1) +
              " has zero sample variance",
          j);
    }
    scale(j) = std::sqrt(var);
  }
  StandardizedDesign out{design, scale};
  for (int j = 0; j < d; ++j) out.design.y_mat.col(j) /= scale(j);
  for (int k = 0; k < design.p; ++k)
    for (int i = 0; i < d; ++i) out.design.x_mat.col(k * d + i) /= scale(i);
  return out;
}

MatrixXd unstandardize(const MatrixXd& b_tilde, const VectorXd& scale) {
  const auto d = scale.size();
  if (b_tilde.cols() != d || b_tilde.rows() % d != 0) {
    throw DimensionError("unstandardize: shape mismatch");
  }
  MatrixXd b = b_tilde;
  for (Eigen::Index r = 0; r < b.rows(); ++r) {
    for (Eigen::Index j = 0; j < d; ++j) {
      b(r, j) *= scale(j) / scale(r % d);
    }
  }
  return b;
}

MatrixXd adaptive_weights(const MatrixXd& b_first, int n) {
  if (n < 1) throw DataError("adaptive_weights: n must be positive");
  const double floor = 1.0 / std::sqrt(static_cast<double>(n));
  return (b_first.cwiseAbs().array() + floor).inverse().matrix();
}

double weighted_rss(const SampleDesign& design, const MatrixXd& b,
                    const MatrixXd& omega) {
  const MatrixXd e = design.y_mat - design.x_mat * b;
  return (e * omega).cwiseProduct(e).sum();
}

}  // namespace sparsevar
