#include "sparsevar/oracles.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace sparsevar::oracle {

std::optional<double> lp_vertex_enumeration(const LpProblem& lp,
                                            double feas_tol) {
  const auto n = lp.c.size();
  const auto m = lp.g_rhs.size();
  // All constraints as rows of A x <= b, including -x <= 0.
  MatrixXd a(m + n, n);
  VectorXd b(m + n);
  a.topRows(m) = lp.g_mat;
  b.head(m) = lp.g_rhs;
  a.bottomRows(n) = -MatrixXd::Identity(n, n);
  b.tail(n).setZero();
  const auto total = m + n;

  std::optional<double> best;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    MatrixXd sub(n, n);
    VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      sub.row(i) = a.row(pick[i]);
      rhs(i) = b(pick[i]);
    }
    Eigen::FullPivLU<MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      const VectorXd x = lu.solve(rhs);
      if (((a * x - b).array() <= feas_tol).all()) {
        const double obj = lp.c.dot(x);
        if (!best || obj < *best) best = obj;
      }
    }
    int i = static_cast<int>(n) - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

VectorXd least_squares(const MatrixXd& x, const VectorXd& y) {
  return x.colPivHouseholderQr().solve(y);
}

double spectral_radius_2x2(const MatrixXd& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4 * det));
  return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

MatrixXd lyapunov_series(const MatrixXd& a, const MatrixXd& s, int terms) {
  MatrixXd acc = MatrixXd::Zero(s.rows(), s.cols());
  MatrixXd pw = MatrixXd::Identity(a.rows(), a.cols());
  for (int j = 0; j < terms; ++j) {
    acc += pw * s * pw.transpose();
    pw = a * pw;
  }
  return acc;
}

}  // namespace sparsevar::oracle
