#pragma once

// Brute-force reference computations used to certify the solvers.

#include <optional>

#include "sparsevar/linear_program.hpp"

namespace sparsevar::oracle {

/// Optimal objective of min c'x s.t. Gx <= g, x >= 0 by enumerating every
/// basic solution. Empty when infeasible. Intended for n <= 8.
std::optional<double> lp_vertex_enumeration(const LpProblem& lp,
                                            double feas_tol = 1e-9);

/// Least-squares coefficients via a QR solve of the normal equations.
VectorXd least_squares(const MatrixXd& x, const VectorXd& y);

/// Largest eigenvalue modulus via the characteristic polynomial of a 2x2.
double spectral_radius_2x2(const MatrixXd& m);

/// Truncated series sum_{j<terms} A^j S A^j'.
MatrixXd lyapunov_series(const MatrixXd& a, const MatrixXd& s, int terms);

}  // namespace sparsevar::oracle
