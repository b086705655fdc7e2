#pragma once

// Lambda grids and information-criterion selection.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparsevar/estimators.hpp"

namespace sparsevar {

enum class IcKind { kBic, kEric };

struct TuningRule {
  IcKind kind = IcKind::kBic;
  double nu = 1.0;  // ERIC exponent

  void validate() const;
  std::string name() const;
};

TuningRule parse_tuning_rule(const std::string& text);

/// `size` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, int size, double ratio);

/// Smallest lambda with an all-zero Lasso solution: max_i |c_i| / w_i over
/// w_i > 0. j < 0 takes the maximum over all responses.
double lambda_max_lasso(const Moments& mom, int j, const MatrixXd& weights);
/// Smallest lambda at which zero is Dantzig-feasible: max_i |c_i|.
double lambda_max_dantzig(const Moments& mom, int j);

/// N log(rss/N) + df log N.
double bic_score(double rss, long df, long n_eff);
/// N log(rss/N) + 2 nu df log(rss/lambda).
double eric_score(double rss, long df, long n_eff, double lambda, double nu);
double ic_score(const TuningRule& rule, double rss, long df, long n_eff,
                double lambda);

struct GridPoint {
  double lambda = 0.0;
  double rss = 0.0;
  long df = 0;
  double score = 0.0;
  bool ok = false;
  std::string error;
};

struct Selection {
  double lambda = 0.0;
  VectorXd coef;
  double score = 0.0;
  int index = -1;
  std::vector<GridPoint> path;
};

/// Fit at lambda, optionally warm-started from the previous grid point.
using PathFit = std::function<VectorXd(double lambda, const VectorXd* warm)>;
using RssFn = std::function<double(const VectorXd& coef)>;

/// Fits along the (descending) grid and returns the score minimizer; ties
/// go to the larger lambda. Grid points whose fit or score throws are
/// skipped. df counts |coef| > df_tol. Rethrows the last error if no point
/// could be scored.
Selection select_lambda(const PathFit& fit, const RssFn& rss, long n_eff,
                        const TuningRule& rule, std::span<const double> grid,
                        double df_tol = 0.0);

}  // namespace sparsevar
