#include "sparsevar/linear_program.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sparsevar/errors.hpp"

namespace sparsevar {

void LpProblem::validate() const {
  if (g_mat.cols() != c.size() || g_mat.rows() != g_rhs.size()) {
    throw DimensionError("LpProblem: inconsistent dimensions");
  }
  if (!c.allFinite() || !g_mat.allFinite() || !g_rhs.allFinite()) {
    throw DataError("LpProblem: non-finite data");
  }
}

namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
 public:
  Tableau(const LpProblem& lp, const LpOptions& opts)
      : n_(lp.c.size()), m_(lp.g_rhs.size()), opts_(opts) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (lp.g_rhs(i) < 0) ++n_art_;
    }
    width_ = n_ + m_ + n_art_;
    t_ = MatrixXd::Zero(m_, width_ + 1);
    basis_.resize(m_);
    Eigen::Index art = n_ + m_;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sgn = lp.g_rhs(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sgn * lp.g_mat.row(i);
      t_(i, n_ + i) = sgn;
      t_(i, width_) = sgn * lp.g_rhs(i);
      if (sgn < 0) {
        t_(i, art) = 1.0;
        basis_[i] = art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
  }

  // Phase 1. Returns the minimal sum of artificials.
  double phase_one() {
    if (n_art_ == 0) return 0.0;
    VectorXd cost = VectorXd::Zero(width_);
    cost.tail(n_art_).setOnes();
    set_objective(cost);
    iterate(width_);
    return -obj_(width_);
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_ + m_) continue;
      Eigen::Index best = -1;
      double best_abs = kPivotTol;
      for (Eigen::Index j = 0; j < n_ + m_; ++j) {
        if (std::abs(t_(i, j)) > best_abs) {
          best_abs = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

  void phase_two(const VectorXd& c) {
    VectorXd cost = VectorXd::Zero(width_);
    cost.head(n_) = c;
    set_objective(cost);
    iterate(n_ + m_);
  }

  // Current primal values of the structural and slack variables.
  VectorXd basic_solution() const {
    VectorXd x = VectorXd::Zero(width_);
    for (Eigen::Index i = 0; i < m_; ++i) x(basis_[i]) = t_(i, width_);
    return x;
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }
  long pivots() const { return pivots_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }

 private:
  void set_objective(const VectorXd& cost) {
    obj_ = VectorXd::Zero(width_ + 1);
    obj_.head(width_) = cost;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) obj_ -= cb * t_.row(i).transpose();
    }
  }

  void pivot(Eigen::Index r, Eigen::Index col) {
    t_.row(r) /= t_(r, col);
    t_(r, col) = 1.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f != 0.0) {
        t_.row(i) -= f * t_.row(r);
        t_(i, col) = 0.0;
      }
    }
    if (obj_.size() > 0) {
      const double f = obj_(col);
      if (f != 0.0) {
        obj_ -= f * t_.row(r).transpose();
        obj_(col) = 0.0;
      }
    }
    basis_[r] = col;
    ++pivots_;
  }

  // Columns >= limit may not enter.
  void iterate(Eigen::Index limit) {
    const double dtol = opts_.tol * 1e-3;
    int degenerate_run = 0;
    for (;;) {
      if (pivots_ >= opts_.max_pivots) {
        throw PivotLimitError("lp_solve: pivot limit reached", pivots_);
      }
      const bool bland = degenerate_run >= opts_.bland_after;
      Eigen::Index enter = -1;
      double best = -dtol;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (obj_(j) < best) {
          enter = j;
          if (bland) break;
          best = obj_(j);
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double r = t_(i, width_) / a;
        const double eps = 1e-12 * std::max(1.0, std::abs(r));
        if (leave < 0 || r < ratio - eps) {
          ratio = r;
          leave = i;
        } else if (r <= ratio + eps && basis_[i] < basis_[leave]) {
          ratio = std::min(ratio, r);
          leave = i;
        }
      }
      if (leave < 0) throw LpUnboundedError("lp_solve: problem is unbounded");
      degenerate_run = ratio <= 1e-13 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
  }

  Eigen::Index n_;
  Eigen::Index m_;
  Eigen::Index n_art_ = 0;
  Eigen::Index width_ = 0;
  LpOptions opts_;
  MatrixXd t_;
  VectorXd obj_;
  std::vector<Eigen::Index> basis_;
  long pivots_ = 0;
};

double violation(const LpProblem& lp, const VectorXd& x) {
  const double neg = std::max(0.0, -x.minCoeff());
  const double row =
      std::max(0.0, (lp.g_mat * x - lp.g_rhs).maxCoeff());
  return std::max(neg, row);
}

// Re-solves the final basis against the original data; this removes the
// rounding accumulated across pivots.
VectorXd refine(const LpProblem& lp, const Tableau& tab, const VectorXd& raw) {
  const Eigen::Index m = tab.m();
  const Eigen::Index n = tab.n();
  MatrixXd bmat = MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index col = tab.basis()[i];
    if (col < n) {
      bmat.col(i) = lp.g_mat.col(col);
    } else if (col < n + m) {
      bmat(col - n, i) = 1.0;
    } else {
      return raw;  // redundant row with a basic artificial
    }
  }
  Eigen::FullPivLU<MatrixXd> lu(bmat);
  if (!lu.isInvertible()) return raw;
  const VectorXd xb = lu.solve(lp.g_rhs);
  VectorXd x = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < n) x(tab.basis()[i]) = xb(i);
  }
  return x;
}

}  // namespace

LpSolution lp_solve(const LpProblem& problem, const LpOptions& opts) {
  problem.validate();
  const Eigen::Index n = problem.c.size();
  if (problem.g_rhs.size() == 0) {
    if ((problem.c.array() < 0).any()) {
      throw LpUnboundedError("lp_solve: problem is unbounded");
    }
    return {VectorXd::Zero(n), 0.0, 0};
  }
  Tableau tab(problem, opts);
  const double infeas = tab.phase_one();
  const double scale = std::max(1.0, problem.g_rhs.cwiseAbs().maxCoeff());
  if (infeas > opts.tol * scale) {
    throw LpInfeasibleError("lp_solve: no feasible point (phase-one residual " +
                            std::to_string(infeas) + ")");
  }
  tab.drive_out_artificials();
  tab.phase_two(problem.c);

  const VectorXd raw = tab.basic_solution().head(n).cwiseMax(0.0);
  VectorXd x = refine(problem, tab, raw);
  x = x.cwiseMax(0.0);
  if (violation(problem, raw) < violation(problem, x)) x = raw;
  return {x, problem.c.dot(x), tab.pivots()};
}

}  // namespace sparsevar
