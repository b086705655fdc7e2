#include "sparsevar/fit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sparsevar/errors.hpp"

namespace sparsevar {

std::string method_name(Method m) {
  switch (m) {
    case Method::kVecLasso:
      return "Vec-Lasso";
    case Method::kRowLasso:
      return "Row-Lasso";
    case Method::kRowDantzig:
      return "Row-Dantzig";
  }
  return "?";
}

void EstimatorConfig::validate() const {
  tuning.validate();
  threshold_rule.validate();
  cov_rule.validate();
  if (grid_size < 1) throw ConfigError("grid size must be >= 1");
  if (grid_ratio != 0.0 && !(grid_ratio > 0.0 && grid_ratio < 1.0)) {
    throw ConfigError("grid ratio must lie in (0, 1)");
  }
  if (!(threshold_multiplier > 0.0)) {
    throw ConfigError("threshold multiplier must be positive");
  }
}

double EstimatorConfig::effective_ratio() const {
  if (grid_ratio > 0.0) return grid_ratio;
  return method == Method::kRowDantzig ? 0.01 : 0.001;
}

std::string EstimatorConfig::name() const {
  std::string mods;
  if (threshold) mods += 'T';
  if (standardize) mods += 'S';
  if (adaptive) mods += 'A';
  std::string out = method_name(method);
  if (!mods.empty()) out += " " + mods;
  return out + " " + tuning.name();
}

EstimatorConfig parse_estimator_name(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> words;
  for (std::string w; is >> w;) words.push_back(w);
  if (words.size() < 2 || words.size() > 3) {
    throw ConfigError("estimator name '" + text +
                      "' must read '<method> [mods] <BIC|ERIC>'");
  }
  EstimatorConfig cfg;
  const std::string& m = words.front();
  if (m == "Row-Lasso") {
    cfg.method = Method::kRowLasso;
  } else if (m == "Vec-Lasso") {
    cfg.method = Method::kVecLasso;
  } else if (m == "Row-Dantzig") {
    cfg.method = Method::kRowDantzig;
  } else {
    throw ConfigError("unknown method '" + m +
                      "' (expected Row-Lasso, Vec-Lasso or Row-Dantzig)");
  }
  cfg.tuning = parse_tuning_rule(words.back());
  if (words.size() == 3) {
    for (char c : words[1]) {
      bool* flag = c == 'T' ? &cfg.threshold
                   : c == 'S' ? &cfg.standardize
                   : c == 'A' ? &cfg.adaptive
                              : nullptr;
      if (!flag || *flag) {
        throw ConfigError("bad modification letters '" + words[1] +
                          "' (use each of T, S, A at most once)");
      }
      *flag = true;
    }
  }
  return cfg;
}

namespace {

constexpr double kDantzigDfTol = 1e-10;

struct Working {
  SampleDesign design;
  Moments mom;
  VectorXd scale;  // empty unless standardized
};

double row_rss(const SampleDesign& des, int j, const VectorXd& beta) {
  return (des.y_mat.col(j) - des.x_mat * beta).squaredNorm();
}

// Selects lambda for row j; returns false and records the failure if every
// grid point failed.
bool select_row(const EstimatorConfig& cfg, const Working& w, int j,
                const VectorXd& weights, VectorXd& beta, double& lambda) {
  const double lmax = cfg.method == Method::kRowDantzig
                          ? lambda_max_dantzig(w.mom, j)
                          : lambda_max_lasso(w.mom, j, weights);
  if (lmax == 0.0) {
    beta = VectorXd::Zero(w.mom.gram.rows());
    lambda = 0.0;
    return true;
  }
  const auto grid = lambda_grid(lmax, cfg.grid_size, cfg.effective_ratio());
  PathFit path;
  if (cfg.method == Method::kRowDantzig) {
    path = [&](double lam, const VectorXd*) {
      return dantzig_row(w.mom, j, lam, weights);
    };
  } else {
    path = [&](double lam, const VectorXd* warm) {
      return lasso_row(w.mom, j, lam, weights, cfg.cd, warm);
    };
  }
  const Selection sel = select_lambda(
      path, [&](const VectorXd& b) { return row_rss(w.design, j, b); },
      w.design.n_eff, cfg.tuning, grid,
      cfg.method == Method::kRowDantzig ? kDantzigDfTol : 0.0);
  beta = sel.coef;
  lambda = sel.lambda;
  return true;
}

VectorXd fit_row_at(const EstimatorConfig& cfg, const Working& w, int j,
                    const VectorXd& weights, double lambda) {
  if (cfg.method == Method::kRowDantzig) {
    return dantzig_row(w.mom, j, lambda, weights);
  }
  return lasso_row(w.mom, j, lambda, weights, cfg.cd);
}

void row_pass(const EstimatorConfig& cfg, const Working& w,
              const MatrixXd& weights, bool reselect, MatrixXd& b,
              VectorXd& lambdas, VarEstimate& est, const char* pass) {
  const int d = w.design.d;
  for (int j = 0; j < d; ++j) {
    try {
      if (reselect) {
        VectorXd beta;
        double lam = 0.0;
        select_row(cfg, w, j, weights.col(j), beta, lam);
        b.col(j) = beta;
        lambdas(j) = lam;
      } else {
        if (!std::isfinite(lambdas(j))) continue;
        b.col(j) = fit_row_at(cfg, w, j, weights.col(j), lambdas(j));
      }
    } catch (const std::exception& e) {
      est.failures.push_back({j, std::string(pass) + ": " + e.what()});
      if (reselect && std::string(pass) == "first pass") {
        b.col(j).setZero();
        lambdas(j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
}

MatrixXd vec_flat_to_matrix(const VectorXd& v, Eigen::Index rows,
                            Eigen::Index cols) {
  return Eigen::Map<const MatrixXd>(v.data(), rows, cols);
}

double vec_lambda_max(const Working& w, const MatrixXd& omega,
                      const MatrixXd& weights) {
  const MatrixXd grad = w.mom.xty * omega;
  double best = 0.0;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (weights(i) > 0.0) best = std::max(best, std::abs(grad(i)) / weights(i));
  }
  return best;
}

Selection vec_select(const EstimatorConfig& cfg, const Working& w,
                     const MatrixXd& omega, const MatrixXd& weights) {
  const Eigen::Index k = w.mom.gram.rows();
  const Eigen::Index d = w.mom.xty.cols();
  const double lmax = vec_lambda_max(w, omega, weights);
  if (lmax == 0.0) {
    Selection sel;
    sel.coef = VectorXd::Zero(k * d);
    sel.lambda = 0.0;
    return sel;
  }
  const auto grid = lambda_grid(lmax, cfg.grid_size, cfg.effective_ratio());
  const PathFit path = [&](double lam, const VectorXd* warm) {
    MatrixXd start;
    if (warm) start = vec_flat_to_matrix(*warm, k, d);
    const MatrixXd b =
        lasso_vec(w.mom, omega, lam, weights, cfg.cd, warm ? &start : nullptr);
    return VectorXd(Eigen::Map<const VectorXd>(b.data(), b.size()));
  };
  const RssFn rss = [&](const VectorXd& v) {
    return weighted_rss(w.design, vec_flat_to_matrix(v, k, d), omega);
  };
  return select_lambda(path, rss, static_cast<long>(w.design.n_eff) * d,
                       cfg.tuning, grid);
}

std::string join_scale(const VectorXd& s) {
  std::ostringstream os;
  os.precision(6);
  for (Eigen::Index i = 0; i < s.size(); ++i) os << (i ? " " : "") << s(i);
  return os.str();
}

}  // namespace

VarEstimate fit(const EstimatorConfig& cfg, const TimeSeries& series, int p) {
  cfg.validate();
  const SampleDesign raw = build_design(series, p);
  const int d = raw.d;
  const int n = series.n();

  Working w;
  if (cfg.standardize) {
    StandardizedDesign st = standardize(raw, series);
    w.design = std::move(st.design);
    w.scale = std::move(st.scale);
  } else {
    w.design = raw;
  }
  w.mom = compute_moments(w.design);
  const Eigen::Index k = w.mom.gram.rows();

  VarEstimate est;
  est.p = p;
  est.d = d;
  est.lambdas = VectorXd::Zero(d);
  est.provenance.push_back("estimator=" + cfg.display());
  est.provenance.push_back("method=" + method_name(cfg.method) +
                           " tuning=" + cfg.tuning.name() +
                           " grid_size=" + std::to_string(cfg.grid_size) +
                           " grid_ratio=" + std::to_string(cfg.effective_ratio()));
  if (cfg.tuning.kind == IcKind::kEric) {
    est.provenance.push_back(
        "ERIC formula N*log(RSS/N) + 2*nu*df*log(RSS/lambda), nu=" +
        std::to_string(cfg.tuning.nu) + " (adopted, not printed in the source)");
  }
  if (cfg.standardize) {
    est.provenance.push_back("standardized, scales=" + join_scale(w.scale));
  }

  MatrixXd b = MatrixXd::Zero(k, d);
  MatrixXd weights = MatrixXd::Ones(k, d);

  if (cfg.method == Method::kVecLasso) {
    EstimatorConfig pilot_cfg = cfg;
    pilot_cfg.method = Method::kRowLasso;
    MatrixXd pilot = MatrixXd::Zero(k, d);
    VectorXd pilot_l = VectorXd::Zero(d);
    row_pass(pilot_cfg, w, weights, true, pilot, pilot_l, est, "first pass");
    ResidualMatrix res;
    res.values = w.design.y_mat - w.design.x_mat * pilot;
    res.values.rowwise() -= res.values.colwise().mean();
    res.centered = true;
    const ThresholdedCov tc = thresholded_cov(res, cfg.cov_rule, cfg.cov_cv);
    bool fallback = false;
    const MatrixXd omega = weighting_precision(tc.cov, &fallback);
    est.provenance.push_back("weighting: thresholded residual covariance, rule=" +
                             cfg.cov_rule.name() + " lambda=" +
                             std::to_string(tc.lambda) +
                             (fallback ? " (not PD, diagonal fallback)" : ""));
    Selection sel = vec_select(cfg, w, omega, weights);
    double lam = sel.lambda;
    b = vec_flat_to_matrix(sel.coef, k, d);
    if (cfg.adaptive) {
      weights = adaptive_weights(b, n);
      if (cfg.reselect_lambda) {
        sel = vec_select(cfg, w, omega, weights);
        lam = sel.lambda;
        b = vec_flat_to_matrix(sel.coef, k, d);
      } else {
        b = lasso_vec(w.mom, omega, lam, weights, cfg.cd);
      }
    }
    // column j sees the penalty of a row Lasso at lambda / omega_jj
    for (int j = 0; j < d; ++j) est.lambdas(j) = lam / omega(j, j);
    if (cfg.threshold) {
      for (int j = 0; j < d; ++j) {
        b.col(j) = threshold_matrix(cfg.threshold_rule,
                                    est.lambdas(j) * cfg.threshold_multiplier,
                                    b.col(j));
      }
    }
  } else {
    row_pass(cfg, w, weights, true, b, est.lambdas, est, "first pass");
    if (cfg.adaptive) {
      weights = adaptive_weights(b, n);
      row_pass(cfg, w, weights, cfg.reselect_lambda, b, est.lambdas, est,
               "adaptive pass");
    }
    if (cfg.threshold) {
      for (int j = 0; j < d; ++j) {
        if (!std::isfinite(est.lambdas(j))) continue;
        b.col(j) = threshold_matrix(cfg.threshold_rule,
                                    est.lambdas(j) * cfg.threshold_multiplier,
                                    b.col(j));
      }
    }
  }
  if (cfg.adaptive) {
    est.provenance.push_back(std::string("adaptive weights 1/(|B|+1/sqrt(n)), "
                                         "lambda ") +
                             (cfg.reselect_lambda ? "re-selected" : "reused"));
  }
  if (cfg.threshold) {
    est.provenance.push_back("threshold rule=" + cfg.threshold_rule.name() +
                             " level=lambda*" +
                             std::to_string(cfg.threshold_multiplier));
    if (!cfg.threshold_rule.conforming()) {
      est.provenance.push_back(
          "warning: hard thresholding violates condition 1");
    }
  }
  for (const auto& f : est.failures) {
    est.provenance.push_back("row " + std::to_string(f.row + 1) +
                             " failure: " + f.message);
  }
  est.b_hat = cfg.standardize ? unstandardize(b, w.scale) : b;
  return est;
}

}  // namespace sparsevar
