#pragma once

// Dense two-phase primal simplex for min c'x s.t. Gx <= g, x >= 0.

#include "sparsevar/var_model.hpp"

namespace sparsevar {

struct LpProblem {
  VectorXd c;  // n
  MatrixXd g_mat;  // m x n
  VectorXd g_rhs;  // m

  void validate() const;
};

struct LpOptions {
  double tol = 1e-9;
  long max_pivots = 200000;
  /// Consecutive degenerate pivots before switching from the steepest
  /// reduced-cost rule to Bland's rule.
  int bland_after = 25;
};

struct LpSolution {
  VectorXd x;
  double objective = 0.0;
  long pivots = 0;
};

/// Throws LpInfeasibleError, LpUnboundedError or PivotLimitError.
LpSolution lp_solve(const LpProblem& problem, const LpOptions& opts = {});

}  // namespace sparsevar
