#include "sparsevar/tuning.hpp"

#include <cmath>
#include <exception>

#include "sparsevar/errors.hpp"

namespace sparsevar {

void TuningRule::validate() const {
  if (kind == IcKind::kEric && !(nu > 0.0)) {
    throw ConfigError("ERIC exponent nu must be positive");
  }
}

std::string TuningRule::name() const {
  return kind == IcKind::kBic ? "BIC" : "ERIC";
}

TuningRule parse_tuning_rule(const std::string& text) {
  std::string up;
  for (char c : text) up += static_cast<char>(std::toupper(c));
  if (up == "BIC") return {IcKind::kBic, 1.0};
  if (up == "ERIC") return {IcKind::kEric, 1.0};
  throw ConfigError("unknown tuning rule '" + text + "' (expected BIC or ERIC)");
}

std::vector<double> lambda_grid(double lambda_max, int size, double ratio) {
  if (size < 1) throw ConfigError("lambda grid size must be >= 1");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("lambda grid ratio must lie in (0, 1)");
  }
  if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max)) {
    throw DataError("lambda_max must be finite and nonnegative");
  }
  if (lambda_max == 0.0 || size == 1) return {lambda_max};
  std::vector<double> grid(size);
  const double step = std::log(ratio) / (size - 1);
  grid.front() = lambda_max;
  for (int k = 1; k < size - 1; ++k) grid[k] = lambda_max * std::exp(step * k);
  grid.back() = lambda_max * ratio;
  return grid;
}

double lambda_max_lasso(const Moments& mom, int j, const MatrixXd& weights) {
  const auto k = mom.xty.rows();
  double best = 0.0;
  const auto lo = j < 0 ? 0 : j;
  const auto hi = j < 0 ? mom.xty.cols() : j + 1;
  for (Eigen::Index c = lo; c < hi; ++c) {
    const Eigen::Index wc = weights.cols() == 1 ? 0 : c;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double w = weights(i, wc);
      if (w > 0.0) best = std::max(best, std::abs(mom.xty(i, c)) / w);
    }
  }
  return best;
}

double lambda_max_dantzig(const Moments& mom, int j) {
  if (j < 0) return mom.xty.cwiseAbs().maxCoeff();
  return mom.xty.col(j).cwiseAbs().maxCoeff();
}

double bic_score(double rss, long df, long n_eff) {
  if (!(rss > 0.0)) throw NumericError("bic_score: degenerate fit (rss <= 0)");
  if (n_eff <= 0) throw DataError("bic_score: n_eff must be positive");
  const double n = static_cast<double>(n_eff);
  return n * std::log(rss / n) + static_cast<double>(df) * std::log(n);
}

double eric_score(double rss, long df, long n_eff, double lambda, double nu) {
  if (!(lambda > 0.0)) throw NumericError("eric_score: lambda must be positive");
  if (!(rss > 0.0)) throw NumericError("eric_score: degenerate fit (rss <= 0)");
  if (n_eff <= 0) throw DataError("eric_score: n_eff must be positive");
  const double n = static_cast<double>(n_eff);
  return n * std::log(rss / n) +
         2.0 * nu * static_cast<double>(df) * std::log(rss / lambda);
}

double ic_score(const TuningRule& rule, double rss, long df, long n_eff,
                double lambda) {
  return rule.kind == IcKind::kBic ? bic_score(rss, df, n_eff)
                                   : eric_score(rss, df, n_eff, lambda, rule.nu);
}

Selection select_lambda(const PathFit& fit, const RssFn& rss, long n_eff,
                        const TuningRule& rule, std::span<const double> grid,
                        double df_tol) {
  if (grid.empty()) throw ConfigError("select_lambda: empty grid");
  Selection sel;
  sel.path.resize(grid.size());
  std::exception_ptr last_error;
  VectorXd warm;
  bool have_warm = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    GridPoint& pt = sel.path[k];
    pt.lambda = grid[k];
    VectorXd coef;
    try {
      coef = fit(grid[k], have_warm ? &warm : nullptr);
      warm = coef;
      have_warm = true;
      pt.rss = rss(coef);
      pt.df = (coef.array().abs() > df_tol).count();
      pt.score = ic_score(rule, pt.rss, pt.df, n_eff, grid[k]);
      pt.ok = std::isfinite(pt.score);
      if (!pt.ok) pt.error = "non-finite score";
    } catch (const std::exception& e) {
      pt.error = e.what();
      last_error = std::current_exception();
      continue;
    }
    if (pt.ok && (sel.index < 0 || pt.score < sel.score)) {
      sel.index = static_cast<int>(k);
      sel.score = pt.score;
      sel.lambda = grid[k];
      sel.coef = coef;
    }
  }
  if (sel.index < 0) {
    if (last_error) std::rethrow_exception(last_error);
    throw NumericError("select_lambda: no grid point produced a finite score");
  }
  return sel;
}

}  // namespace sparsevar
