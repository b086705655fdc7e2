#pragma once

// Generalized thresholding rules and their component-wise application.

#include <span>
#include <string>

#include "sparsevar/var_model.hpp"

namespace sparsevar {

enum class ThresholdKind { kSoft, kAdaptive, kHard };

struct ThresholdRule {
  ThresholdKind kind = ThresholdKind::kSoft;
  double nu = 4.0;  // adaptive exponent

  static ThresholdRule soft() { return {ThresholdKind::kSoft, 4.0}; }
  static ThresholdRule adaptive(double nu = 4.0) {
    return {ThresholdKind::kAdaptive, nu};
  }
  static ThresholdRule hard() { return {ThresholdKind::kHard, 4.0}; }

  /// Constant c with |THR(z)| <= c|y| whenever |z - y| <= lambda.
  /// soft: 1, adaptive: nu, hard: NaN (no finite constant exists).
  double c_const() const;
  /// False for hard thresholding.
  bool conforming() const { return kind != ThresholdKind::kHard; }
  void validate() const;
  std::string name() const;
};

/// Parses "soft", "hard", "adaptive" or "adaptive:<nu>".
ThresholdRule parse_threshold_rule(const std::string& text);

double threshold_scalar(const ThresholdRule& rule, double lambda, double z);
MatrixXd threshold_matrix(const ThresholdRule& rule, double lambda,
                          const MatrixXd& m);

struct RuleConditionReport {
  bool pass = true;
  int condition = 0;  // 1, 2 or 3 for the first failure
  double z = 0.0;
  double y = 0.0;
};

/// Checks conditions 1-3 over all grid pairs with |z - y| <= lambda. For
/// condition 1 the rule's constant is used, or 1 when it has none.
RuleConditionReport verify_rule_conditions(const ThresholdRule& rule,
                                           double lambda,
                                           std::span<const double> grid);

/// (4 + c) s t_n^(1-q).
double theorem1_bound(const SparsityClass& cls, double c_const, double t_n);

struct Theorem1Errors {
  double err_one = 0.0;  // ||A - THR(A_hat)||_1 on companion forms
  double err_inf = 0.0;  // ||A - THR(A_hat)||_inf
};

/// Thresholds the coefficient blocks of `estimate` at `lambda` and compares
/// the companion matrices with those of `truth`.
Theorem1Errors theorem1_errors(std::span<const MatrixXd> truth,
                               std::span<const MatrixXd> estimate,
                               const ThresholdRule& rule, double lambda);

}  // namespace sparsevar
