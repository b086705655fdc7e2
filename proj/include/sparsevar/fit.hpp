#pragma once

// Estimator configurations and the S/A/T fitting pipeline.

#include <string>
#include <vector>

#include "sparsevar/covariance.hpp"
#include "sparsevar/estimators.hpp"
#include "sparsevar/thresholding.hpp"
#include "sparsevar/tuning.hpp"

namespace sparsevar {

enum class Method { kVecLasso, kRowLasso, kRowDantzig };

std::string method_name(Method m);

struct EstimatorConfig {
  std::string label;  // free-form; name() is used when empty
  Method method = Method::kRowLasso;
  bool standardize = false;  // S
  bool adaptive = false;     // A
  bool threshold = false;    // T
  TuningRule tuning;
  int grid_size = 50;
  double grid_ratio = 0.0;  // 0 selects 0.001 (Lasso) or 0.01 (Dantzig)
  bool reselect_lambda = true;  // second adaptive pass re-tunes lambda
  ThresholdRule threshold_rule = ThresholdRule::adaptive(4.0);
  double threshold_multiplier = 1.0;
  ThresholdRule cov_rule = ThresholdRule::soft();  // Vec-Lasso weighting
  CvSpec cov_cv;
  CdOptions cd;

  void validate() const;
  double effective_ratio() const;
  /// e.g. "Row-Lasso TSA BIC".
  std::string name() const;
  std::string display() const { return label.empty() ? name() : label; }
};

/// Parses names such as "Row-Lasso TSA BIC", "Vec-Lasso SA ERIC" or
/// "Row-Dantzig BIC" (modification letters in any order).
EstimatorConfig parse_estimator_name(const std::string& text);

struct RowFailure {
  int row = 0;
  std::string message;
};

struct VarEstimate {
  MatrixXd b_hat;  // dp x d
  VectorXd lambdas;  // per row; Vec-Lasso: lambda / omega_jj
  int p = 0;
  int d = 0;
  std::vector<std::string> provenance;
  std::vector<RowFailure> failures;

  std::vector<MatrixXd> coeffs() const { return unstack_coefficients(b_hat, p); }
};

VarEstimate fit(const EstimatorConfig& config, const TimeSeries& series, int p);

}  // namespace sparsevar
