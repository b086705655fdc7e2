#include "sparsevar/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "sparsevar/errors.hpp"
#include "sparsevar/estimators.hpp"
#include "sparsevar/metrics.hpp"
#include "sparsevar/oracles.hpp"
#include "sparsevar/seeding.hpp"
#include "sparsevar/simlab.hpp"
#include "sparsevar/thresholding.hpp"

namespace sparsevar {

namespace {

using Clock = std::chrono::steady_clock;

class Tally {
 public:
  explicit Tally(std::string name) : start_(Clock::now()) { r_.name = std::move(name); }

  template <typename Describe>
  void record(bool ok, double stat, Describe&& describe) {
    ++r_.cases;
    if (std::isfinite(stat)) r_.worst = std::max(r_.worst, stat);
    if (ok) return;
    ++r_.failures;
    if (r_.detail.empty()) r_.detail = describe();
  }

  CheckResult finish() {
    r_.pass = r_.failures == 0 && r_.cases > 0;
    r_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(r_);
  }

 private:
  CheckResult r_;
  Clock::time_point start_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

MatrixXd normal_matrix(int r, int c, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = z(rng);
  return m;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A_k <- c^k A_k with c = rho / rho(companion)
void scale_to_radius(std::vector<MatrixXd>& a, double rho) {
  const double r = spectral_radius(companion(a).a_stack);
  if (!(r > 0.0)) return;
  const double c = rho / r;
  double f = 1.0;
  for (auto& m : a) {
    f *= c;
    m *= f;
  }
}

double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<VarModel> random_stable_models(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<VarModel> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int d = uniform_int(rng, 1, 20);
    const int p = uniform_int(rng, 1, 4);
    const double rho = uniform(rng, 0.05, 0.95);
    std::vector<MatrixXd> a;
    for (int k = 0; k < p; ++k) a.push_back(normal_matrix(d, d, rng));
    scale_to_radius(a, rho);
    const MatrixXd l = normal_matrix(d, d, rng);
    out.emplace_back(std::move(a), l * l.transpose() / d + 0.1 * MatrixXd::Identity(d, d));
  }
  return out;
}

CheckResult check_lyapunov(const VerifyOptions& opts) {
  Tally t("lyapunov");
  const auto models = random_stable_models(opts.seed, opts.models);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const VarModel& m = models[i];
    const CompanionForm cf = companion(m);
    const MatrixXd sigma_u = cf.embed * m.sigma() * cf.embed.transpose();
    const MatrixXd g = stacked_autocov0(cf.a_stack, sigma_u);
    const double res = lyapunov_residual(cf.a_stack, sigma_u, g);
    t.record(res <= 1e-8, res, [&] {
      return "model " + std::to_string(i) + " (d=" + std::to_string(m.d()) +
             ", p=" + std::to_string(m.p()) + "): residual " + fmt(res);
    });
  }
  // scalar AR(1): Gamma(h) = a^h s2 / (1 - a^2)
  for (double a : {-0.95, -0.7, -0.3, 0.0, 0.2, 0.5, 0.8, 0.95}) {
    for (double s2 : {0.5, 1.0, 3.0}) {
      const VarModel m({MatrixXd::Constant(1, 1, a)}, MatrixXd::Constant(1, 1, s2));
      for (int h = 0; h <= 5; ++h) {
        const double err = std::abs(autocov(m, h)(0, 0) - std::pow(a, h) * s2 / (1 - a * a));
        t.record(err <= 1e-10, err, [&] {
          return "AR(1) a=" + fmt(a) + " h=" + std::to_string(h) + ": error " + fmt(err);
        });
      }
    }
  }
  // diagonal VAR(1): componentwise AR(1) with correlated innovations
  {
    const VectorXd a = (VectorXd(3) << 0.9, -0.4, 0.6).finished();
    MatrixXd s(3, 3);
    s << 1.0, 0.3, -0.2, 0.3, 2.0, 0.5, -0.2, 0.5, 1.5;
    const VarModel m({MatrixXd(a.asDiagonal())}, s);
    for (int h = 0; h <= 3; ++h) {
      const MatrixXd g = autocov(m, h);
      double err = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          err = std::max(err, std::abs(g(i, j) - std::pow(a(i), h) * s(i, j) / (1 - a(i) * a(j))));
      t.record(err <= 1e-10, err, [&] {
        return "diagonal VAR(1) h=" + std::to_string(h) + ": error " + fmt(err);
      });
    }
  }
  return t.finish();
}

CheckResult check_spectral_identity(const VerifyOptions& opts) {
  Tally t("spectral-identity");
  const auto models = random_stable_models(opts.seed, opts.models);
  const int n = opts.spectral_points;
  constexpr double kPi = std::numbers::pi;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const VarModel& m = models[i];
    // Fourier grid; f(-w) is the conjugate of f(w), so points pair up around zero
    MatrixXcd sum = MatrixXcd::Zero(m.d(), m.d());
    for (int k = -(n / 2); k < 0; ++k) {
      const MatrixXcd f = spectral_density(m, 2.0 * kPi * k / n);
      sum += -k == n - n / 2 ? f : MatrixXcd(f + f.conjugate());
    }
    sum += spectral_density(m, 0.0);
    const MatrixXd g0 = autocov(m, 0);
    const double err = max_abs(MatrixXcd(sum * (2.0 * kPi / n) - g0.cast<std::complex<double>>()));
    t.record(err <= 1e-4, err, [&] {
      return "model " + std::to_string(i) + ": Riemann sum error " + fmt(err);
    });

    const MatrixXd si = m.sigma().ldlt().solve(MatrixXd::Identity(m.d(), m.d()));
    double worst = 0.0;
    for (int k = 0; k < 32; ++k) {
      const double w = -kPi + 2.0 * kPi * (k + 0.5) / 32;
      const MatrixXcd prod = inverse_spectral_density(m.coeffs(), si, w) *
                             spectral_density(m, w);
      worst = std::max(worst, max_abs(MatrixXcd(prod - MatrixXcd::Identity(m.d(), m.d()))));
    }
    t.record(worst <= 1e-8, worst, [&] {
      return "model " + std::to_string(i) + ": |f f^-1 - I| = " + fmt(worst);
    });
  }
  return t.finish();
}

CheckResult check_estimator_certificates(const VerifyOptions& opts) {
  Tally t("estimator-certificates");
  std::mt19937_64 rng(derive_seed(opts.seed, 3));
  for (int inst = 0; inst < 24; ++inst) {
    const bool small = inst % 2 == 0;
    const int d = small ? uniform_int(rng, 2, 5) : uniform_int(rng, 6, 10);
    const int p = uniform_int(rng, 1, 2);
    const int s = uniform_int(rng, 1, std::min(d, 3));
    const int n = uniform_int(rng, 60, 200);
    const auto a = random_sparse_varp(d, s, uniform(rng, 0.4, 0.9), p, rng());
    const VarModel truth(a, MatrixXd::Identity(d, d));
    const SampleDesign des = build_design(simulate(truth, n, 200, rng()), p);
    const Moments mom = compute_moments(des);
    const MatrixXd b_true = stack_coefficients(a);
    const VectorXd ones = VectorXd::Ones(d * p);
    const double lam_max = mom.xty.cwiseAbs().maxCoeff();
    const auto where = [&](int j, double lam) {
      return "instance " + std::to_string(inst) + " row " + std::to_string(j) +
             " lambda " + fmt(lam);
    };

    for (double frac : {0.02, 0.1, 0.3, 0.7}) {
      const double lam = frac * lam_max;
      for (int j = 0; j < d; ++j) {
        const VectorXd b = lasso_row(mom, j, lam, ones);
        const double kkt = lasso_kkt_violation(mom, j, lam, ones, b);
        t.record(kkt <= 1e-6, kkt, [&] { return "lasso KKT " + fmt(kkt) + " at " + where(j, lam); });

        const VectorXd bd = dantzig_row(mom, j, lam, ones);
        const double slack = (mom.gram * bd - mom.xty.col(j)).cwiseAbs().maxCoeff() - lam;
        t.record(slack <= 1e-9, slack, [&] {
          return "dantzig infeasible by " + fmt(slack) + " at " + where(j, lam);
        });
        const VectorXd bt = b_true.col(j);
        if ((mom.gram * bt - mom.xty.col(j)).cwiseAbs().maxCoeff() <= lam) {
          const double excess = bd.lpNorm<1>() - bt.lpNorm<1>();
          t.record(excess <= 1e-9, excess, [&] {
            return "dantzig l1 exceeds the truth by " + fmt(excess) + " at " + where(j, lam);
          });
        }
      }
      const MatrixXd l = normal_matrix(d, d, rng, 0.3);
      const MatrixXd omega = l * l.transpose() + MatrixXd::Identity(d, d);
      const MatrixXd w = MatrixXd::Ones(d * p, d);
      const double lam_vec = frac * (mom.xty * omega).cwiseAbs().maxCoeff();
      const MatrixXd bv = lasso_vec(mom, omega, lam_vec, w);
      const double kkt = lasso_vec_kkt_violation(mom, omega, lam_vec, w, bv);
      t.record(kkt <= 1e-6, kkt, [&] { return "vec lasso KKT " + fmt(kkt) + " at " + where(-1, lam_vec); });
    }

    if (small) {
      Eigen::FullPivLU<MatrixXd> lu(des.x_mat);
      if (lu.rank() < des.x_mat.cols()) continue;
      for (int j = 0; j < d; ++j) {
        const VectorXd ls = oracle::least_squares(des.x_mat, des.y_mat.col(j));
        const double e1 = (lasso_row(mom, j, 0.0, ones) - ls).cwiseAbs().maxCoeff();
        const double e2 = (dantzig_row(mom, j, 0.0, ones) - ls).cwiseAbs().maxCoeff();
        t.record(e1 <= 1e-6, e1, [&] { return "lasso at lambda 0 off by " + fmt(e1) + " at " + where(j, 0); });
        t.record(e2 <= 1e-6, e2, [&] { return "dantzig at lambda 0 off by " + fmt(e2) + " at " + where(j, 0); });
      }
    }
  }
  return t.finish();
}

CheckResult check_lp_oracle(const VerifyOptions& opts) {
  Tally t("lp-oracle");
  std::mt19937_64 rng(derive_seed(opts.seed, 4));
  std::normal_distribution<double> z;
  for (int i = 0; i < opts.lp_problems; ++i) {
    const int n = uniform_int(rng, 1, 8);
    const int m = uniform_int(rng, 1, 8);
    LpProblem lp;
    lp.g_mat = normal_matrix(m, n, rng);
    lp.g_rhs = normal_matrix(m, 1, rng);
    lp.c.resize(n);
    // mixed-sign costs stay bounded through an extra sum constraint
    const bool mixed = i % 3 == 0;
    for (int k = 0; k < n; ++k) lp.c(k) = mixed ? z(rng) : uniform(rng, 0.1, 2.0);
    if (mixed) {
      lp.g_mat.conservativeResize(m + 1, n);
      lp.g_mat.row(m).setOnes();
      lp.g_rhs.conservativeResize(m + 1);
      lp.g_rhs(m) = 5.0;
    }
    const auto ref = oracle::lp_vertex_enumeration(lp);
    double err = 0.0;
    bool ok = true;
    try {
      const LpSolution sol = lp_solve(lp);
      err = ref ? std::abs(sol.objective - *ref) : INFINITY;
      ok = ref && err <= 1e-8;
    } catch (const LpInfeasibleError&) {
      ok = !ref;
    } catch (const Error&) {
      ok = false;
    }
    t.record(ok, ok ? err : INFINITY, [&] {
      return "problem " + std::to_string(i) + " (" + std::to_string(n) +
             " variables): objective gap " + fmt(err) + (ref ? "" : ", oracle infeasible");
    });
  }
  for (int i = 0; i < 100; ++i) {
    const int k = uniform_int(rng, 1, 6);
    const VectorXd b = normal_matrix(k, 1, rng);
    const double lam = uniform(rng, 0.0, 1.5);
    const VectorXd beta = dantzig_lp(MatrixXd::Identity(k, k), b, lam, VectorXd::Ones(k));
    double gap = 0.0;
    for (int j = 0; j < k; ++j) {
      gap = std::max(gap, std::abs(beta(j) - threshold_scalar(ThresholdRule::soft(), lam, b(j))));
    }
    t.record(gap == 0.0, gap, [&] {
      return "identity Gram case " + std::to_string(i) + " differs from soft thresholding by " + fmt(gap);
    });
  }
  return t.finish();
}

CheckResult check_theorem1(const VerifyOptions& opts) {
  Tally t("theorem1-bound");
  std::mt19937_64 rng(derive_seed(opts.seed, 5));
  for (int set = 0; set < opts.threshold_sets; ++set) {
    const double q = set % 2 == 0 ? 0.0 : 0.5;
    const int d = uniform_int(rng, 3, 12);
    const int p = uniform_int(rng, 1, 3);
    const int s = uniform_int(rng, 1, std::min(d, 4));
    const auto a = random_sparse_varp(d, s, uniform(rng, 0.3, 0.95), p, rng());

    // smallest s for which the set belongs to the class (variant 1)
    SparsityClass cls;
    cls.variant = 1;
    cls.q = q;
    cls.p = p;
    cls.m_bound = 1e300;
    cls.s = 0.0;
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (const auto& m : a)
        for (int j = 0; j < d; ++j)
          if (m(i, j) != 0.0) acc += std::pow(std::abs(m(i, j)), q);
      cls.s = std::max(cls.s, acc);
    }
    for (const auto& m : a) {
      for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i)
          if (m(i, j) != 0.0) acc += std::pow(std::abs(m(i, j)), q);
        cls.s = std::max(cls.s, acc);
      }
    }
    const MembershipReport rep = class_membership(a, cls);
    t.record(rep.member, 0.0, [&] { return "set " + std::to_string(set) + " not a class member: " + rep.violated; });

    for (int k = 0; k < opts.perturbations; ++k) {
      const double tn = std::exp(uniform(rng, std::log(0.002), std::log(0.3)));
      std::vector<MatrixXd> est = a;
      for (auto& m : est) {
        for (Eigen::Index i = 0; i < m.size(); ++i) {
          // every fourth entry sits on the boundary of the perturbation box
          const double u = uniform(rng, -1.0, 1.0);
          m(i) += tn * (i % 4 == 0 ? (u < 0 ? -1.0 : 1.0) : u);
        }
      }
      for (const ThresholdRule rule : {ThresholdRule::soft(), ThresholdRule::adaptive(4.0)}) {
        const double bound = theorem1_bound(cls, rule.c_const(), tn);
        const Theorem1Errors e = theorem1_errors(a, est, rule, tn);
        const double excess = std::max(e.err_one, e.err_inf) - bound;
        t.record(excess <= 1e-9, std::max(e.err_one, e.err_inf) / bound, [&] {
          return "set " + std::to_string(set) + " q=" + fmt(q) + " rule " + rule.name() +
                 " t_n=" + fmt(tn) + ": error exceeds bound by " + fmt(excess);
        });
      }
    }
  }
  return t.finish();
}

CheckResult check_autocov_bound(const VerifyOptions& opts) {
  Tally t("autocov-bound");
  std::mt19937_64 rng(derive_seed(opts.seed, 6));
  int pairs = 0;
  while (pairs < opts.bound_pairs) {
    const int d = uniform_int(rng, 2, 5);
    const int p = uniform_int(rng, 1, 3);
    std::vector<MatrixXd> a;
    for (int k = 0; k < p; ++k) a.push_back(normal_matrix(d, d, rng));
    scale_to_radius(a, uniform(rng, 0.2, 0.8));
    const MatrixXd l = normal_matrix(d, d, rng, 0.5);
    const VarModel truth(a, l * l.transpose() + MatrixXd::Identity(d, d));
    const double size = uniform(rng, 0.005, 0.08);
    std::vector<MatrixXd> est = a;
    for (auto& m : est) m += normal_matrix(d, d, rng, size);
    if (spectral_radius(companion(est).a_stack) >= 0.95) continue;
    MatrixXd es = truth.sigma() + normal_matrix(d, d, rng, size);
    es = ((es + es.transpose()) / 2).eval();
    ++pairs;
    for (NormKind k : {NormKind::kOne, NormKind::kInf, NormKind::kTwo}) {
      for (int h : {0, 1, 3}) {
        const BoundCheck b = autocov_bound_check(truth, est, es, h, k);
        t.record(b.holds(), b.rhs > 0 ? b.lhs / b.rhs : b.lhs, [&] {
          return "pair " + std::to_string(pairs) + " norm " + norm_name(k) + " h=" +
                 std::to_string(h) + ": lhs " + fmt(b.lhs) + " > rhs " + fmt(b.rhs);
        });
      }
    }
  }
  return t.finish();
}

CheckResult check_inverse_spectral_bound(const VerifyOptions& opts) {
  Tally t("inverse-spectral-bound");
  std::mt19937_64 rng(derive_seed(opts.seed, 7));
  for (int pair = 0; pair < opts.bound_pairs; ++pair) {
    const int d = uniform_int(rng, 2, 5);
    const int p = uniform_int(rng, 1, 3);
    std::vector<MatrixXd> a;
    for (int k = 0; k < p; ++k) a.push_back(normal_matrix(d, d, rng));
    scale_to_radius(a, uniform(rng, 0.2, 0.9));
    const MatrixXd l = normal_matrix(d, d, rng, 0.5);
    const MatrixXd si = (l * l.transpose() + MatrixXd::Identity(d, d)).inverse();
    const double size = uniform(rng, 0.005, 0.2);
    std::vector<MatrixXd> est = a;
    for (auto& m : est) m += normal_matrix(d, d, rng, size);
    MatrixXd ei = si + normal_matrix(d, d, rng, size);
    ei = ((ei + ei.transpose()) / 2).eval();
    for (NormKind k : {NormKind::kOne, NormKind::kInf, NormKind::kTwo}) {
      const BoundCheck b = inverse_spectral_bound_check(a, si, est, ei, k);
      t.record(b.holds(), b.rhs > 0 ? b.lhs / b.rhs : b.lhs, [&] {
        return "pair " + std::to_string(pair) + " norm " + norm_name(k) + ": lhs " +
               fmt(b.lhs) + " > rhs " + fmt(b.rhs);
      });
    }
  }
  return t.finish();
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  return {check_lyapunov(opts),           check_spectral_identity(opts),
          check_estimator_certificates(opts), check_lp_oracle(opts),
          check_theorem1(opts),           check_autocov_bound(opts),
          check_inverse_spectral_bound(opts)};
}

void write_verify_report(std::ostream& os, const std::vector<CheckResult>& results) {
  os << "status,check,cases,failures,worst,detail\n";
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    os << (r.pass ? "PASS" : "FAIL") << ',' << r.name << ',' << r.cases << ','
       << r.failures << ',' << std::setprecision(6) << r.worst << ',' << detail << '\n';
  }
}

}  // namespace sparsevar
