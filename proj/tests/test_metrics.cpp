#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "sparsevar/errors.hpp"
#include "sparsevar/metrics.hpp"

using namespace sparsevar;

namespace {

const NormKind kAll[] = {NormKind::kOne, NormKind::kInf, NormKind::kMax, NormKind::kTwo};

// largest singular value of a 2x2 matrix from the eigenvalues of m^T m
double spectral_norm_2x2(const MatrixXd& m) {
  const MatrixXd g = m.transpose() * m;
  const double tr = g.trace(), det = g.determinant();
  return std::sqrt((tr + std::sqrt(std::max(0.0, tr * tr - 4 * det))) / 2);
}

MatrixXd random_matrix(int r, int c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  MatrixXd m(r, c);
  for (int i = 0; i < m.size(); ++i) m(i) = z(rng);
  return m;
}

// random stable VAR(p) with spectral radius at most 0.8
std::vector<MatrixXd> random_stable(int d, int p, std::mt19937_64& rng) {
  std::vector<MatrixXd> a;
  for (int k = 0; k < p; ++k) a.push_back(random_matrix(d, d, rng, 0.3));
  const double rho = spectral_radius(companion(a).a_stack);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  const double c = u(rng) / rho;
  double f = 1.0;
  for (auto& m : a) {
    f *= c;
    m *= f;
  }
  return a;
}

MatrixXd random_spd(int d, std::mt19937_64& rng) {
  const MatrixXd m = random_matrix(d, d, rng, 0.5);
  return m * m.transpose() + MatrixXd::Identity(d, d);
}

VarModel ar1(double a, double s2 = 1.0) {
  return VarModel({MatrixXd::Constant(1, 1, a)}, MatrixXd::Constant(1, 1, s2));
}

}  // namespace

TEST_CASE("matrix norms") {
  MatrixXd m(2, 2);
  m << 1, -2, 3, 4;
  CHECK(matrix_norm(m, NormKind::kOne) == 6.0);
  CHECK(matrix_norm(m, NormKind::kInf) == 7.0);
  CHECK(matrix_norm(m, NormKind::kMax) == 4.0);
  for (NormKind k : kAll) CHECK(matrix_norm(MatrixXd(MatrixXd::Identity(3, 3)), k) == doctest::Approx(1.0).epsilon(1e-14));
  MatrixXd s(2, 2);
  s << 3, 0, 4, 0;
  CHECK(std::abs(matrix_norm(s, NormKind::kTwo) - spectral_norm_2x2(s)) < 1e-12);
  CHECK(std::abs(matrix_norm(s, NormKind::kTwo) - 5.0) < 1e-12);
  CHECK(matrix_norm(m, NormKind::kTwo) == doctest::Approx(spectral_norm_2x2(m)).epsilon(1e-12));

  MatrixXcd c(1, 2);
  c << std::complex<double>(3, 4), std::complex<double>(0, 1);
  CHECK(matrix_norm(c, NormKind::kInf) == doctest::Approx(6.0));
  CHECK(matrix_norm(c, NormKind::kOne) == doctest::Approx(5.0));
  CHECK(matrix_norm(c, NormKind::kTwo) == doctest::Approx(std::sqrt(26.0)));

  CHECK(parse_norm_kind("INF") == NormKind::kInf);
  CHECK(parse_norm_kind("1") == NormKind::kOne);
  CHECK_THROWS_AS(parse_norm_kind("frobenius"), ConfigError);
}

TEST_CASE("norm axioms on random triples") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < 50; ++rep) {
    const MatrixXd a = random_matrix(4, 3, rng);
    const MatrixXd b = random_matrix(4, 3, rng);
    const double c = std::normal_distribution<double>(0.0, 3.0)(rng);
    for (NormKind k : kAll) {
      CHECK(matrix_norm(MatrixXd(a + b), k) <= matrix_norm(a, k) + matrix_norm(b, k) + 1e-12);
      CHECK(std::abs(matrix_norm(MatrixXd(c * a), k) - std::abs(c) * matrix_norm(a, k)) <=
            1e-12 * (1 + std::abs(c) * matrix_norm(a, k)));
    }
  }
}

TEST_CASE("parameter error") {
  VarModel m = ar1(0.5);
  const std::vector<MatrixXd> same = m.coeffs();
  CHECK(crit_param_error(m, same) == 0.0);

  MatrixXd a = MatrixXd::Zero(3, 3);
  a(1, 2) = 0.4;
  VarModel m3({a}, MatrixXd::Identity(3, 3));
  MatrixXd a_hat = a;
  a_hat(0, 0) += 0.1;
  CHECK(std::abs(crit_param_error(m3, std::vector<MatrixXd>{a_hat}) - 0.1) < 1e-15);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto t = random_stable(3, 2, rng);
    auto e = random_stable(3, 2, rng);
    VarModel truth(t, MatrixXd::Identity(3, 3));
    double brute = 0.0;
    for (int i = 0; i < 3; ++i) {
      double row = 0.0;
      for (int k = 0; k < 2; ++k) row += (t[k].row(i) - e[k].row(i)).cwiseAbs().sum();
      brute = std::max(brute, row);
    }
    CHECK(std::abs(crit_param_error(truth, e) - brute) < 1e-14);
  }
  CHECK_THROWS_AS(crit_param_error(m3, std::vector<MatrixXd>{MatrixXd::Zero(2, 2)}), DimensionError);
}

TEST_CASE("autocovariance error") {
  VarModel truth = ar1(0.5);
  CHECK(crit_gamma_error(truth, truth.coeffs(), truth.sigma()) == 0.0);
  // Gamma(0) = 4/3 against 1 for a zero estimate
  const double e = crit_gamma_error(truth, std::vector<MatrixXd>{MatrixXd::Zero(1, 1)}, truth.sigma());
  CHECK(std::abs(e - 0.25) < 1e-10);
  const double u = crit_gamma_error(truth, std::vector<MatrixXd>{MatrixXd::Constant(1, 1, 1.01)}, truth.sigma());
  CHECK(std::isinf(u));
}

TEST_CASE("spectral density error") {
  VarModel wn({MatrixXd::Zero(2, 2)}, MatrixXd::Identity(2, 2));
  CHECK(crit_spectral_error(wn, wn.coeffs(), wn.sigma()) == 0.0);
  CHECK(std::abs(crit_spectral_error(wn, wn.coeffs(), 2 * wn.sigma()) - 1.0) < 1e-12);
  CHECK(std::isinf(crit_spectral_error(wn, std::vector<MatrixXd>{1.2 * MatrixXd::Identity(2, 2)}, wn.sigma())));

  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    VarModel truth(random_stable(3, 2, rng), random_spd(3, rng));
    auto est = random_stable(3, 2, rng);
    const MatrixXd s = random_spd(3, rng);
    for (NormKind k : {NormKind::kOne, NormKind::kInf}) {
      const double e1 = crit_spectral_error(truth, est, s, k, 512);
      const double e2 = crit_spectral_error(truth, est, s, k, 1024);
      CHECK(std::abs(e1 - e2) < 1e-3);
    }
  }
}

TEST_CASE("Riemann sum of the spectral density recovers Gamma(0)") {
  std::mt19937_64 rng(17);
  VarModel m(random_stable(3, 2, rng), random_spd(3, rng));
  const int n = 512;
  MatrixXcd acc = MatrixXcd::Zero(3, 3);
  for (int k = -n / 2; k < n / 2; ++k) {
    acc += spectral_density(m, 2 * std::numbers::pi * k / n);
  }
  const MatrixXd g = (acc * (2 * std::numbers::pi / n)).real();
  CHECK(matrix_norm(MatrixXd(g - autocov(m, 0)), NormKind::kInf) < 1e-3);
}

TEST_CASE("forecast criterion limits") {
  VarModel wn({MatrixXd::Zero(2, 2)}, (MatrixXd(2, 2) << 2, 0.5, 0.5, 1).finished());
  FitProcedure oracle = [&](const TimeSeries&) { return wn.coeffs(); };
  ForecastMse f = crit_forecast_mse(wn, oracle, 50, 1, 1000, 7);
  CHECK(f.replications == 1000);
  CHECK(std::abs(f.average - 1.0) < 0.1);
  CHECK(std::abs(f.per_component(0) - 1.0) < 0.15);

  VarModel ar = ar1(0.9, 0.5);
  FitProcedure ar_oracle = [&](const TimeSeries&) { return ar.coeffs(); };
  CHECK(std::abs(crit_forecast_mse(ar, ar_oracle, 80, 1, 1000, 8).average - 1.0) < 0.1);
  // the two-step error of the oracle is (1 + a^2) sigma^2
  CHECK(std::abs(crit_forecast_mse(ar, ar_oracle, 80, 2, 2000, 8).average - 1.81) < 0.15);

  int calls = 0;
  FitProcedure flaky = [&](const TimeSeries&) -> std::vector<MatrixXd> {
    if (++calls % 2 == 0) throw NumericError("no fit");
    return wn.coeffs();
  };
  ForecastMse g = crit_forecast_mse(wn, flaky, 30, 1, 10, 1);
  CHECK(g.failures == 5);
  CHECK(g.replications == 5);

  ForecastMse a = crit_forecast_mse(wn, oracle, 30, 1, 20, 99);
  ForecastMse b = crit_forecast_mse(wn, oracle, 30, 1, 20, 99);
  CHECK(a.per_component == b.per_component);
}

TEST_CASE("power square sums") {
  // scalar a: sum a^{2j} = 1 / (1 - a^2)
  const double s = power_square_sum(MatrixXd::Constant(1, 1, 0.5), NormKind::kOne);
  CHECK(s >= 4.0 / 3.0);
  CHECK(s - 4.0 / 3.0 < 1e-10);
  MatrixXd nil = MatrixXd::Zero(2, 2);
  nil(0, 1) = 3.0;
  CHECK(power_square_sum(nil, NormKind::kInf) == 10.0);
  CHECK_THROWS_AS(power_square_sum(MatrixXd::Identity(2, 2), NormKind::kOne, 1e-12, 1000), ConvergenceError);
  CHECK_THROWS_AS(power_square_sum(nil, NormKind::kMax), ConfigError);
}

TEST_CASE("autocovariance bound") {
  VarModel truth = ar1(0.5);
  BoundCheck exact = autocov_bound_check(truth, truth.coeffs(), truth.sigma(), 2, NormKind::kOne);
  CHECK(exact.lhs == 0.0);
  CHECK(exact.rhs == 0.0);

  const std::vector<MatrixXd> pert{MatrixXd::Constant(1, 1, 0.6)};
  BoundCheck b0 = autocov_bound_check(truth, pert, truth.sigma(), 0, NormKind::kOne);
  // 1/(1 - 0.36) - 1/(1 - 0.25)
  CHECK(std::abs(b0.lhs - (1 / 0.64 - 1 / 0.75)) < 1e-10);
  // closed form of the right-hand side: C_A = 4/3, C_Ahat = 1/0.64, sigma = 1
  const double ca = 1 / 0.75, cah = 1 / 0.64;
  const double rhs0 = 0.1 * (cah + ca) * (2 * ca) / 4 + 0.1 * (cah + ca) * (2 * cah) / 4;
  CHECK(std::abs(b0.rhs - rhs0) < 1e-9);
  CHECK(b0.holds());

  std::mt19937_64 rng(33);
  std::normal_distribution<double> z(0.0, 0.05);
  int pairs = 0;
  while (pairs < 50) {
    VarModel m(random_stable(3, 2, rng), random_spd(3, rng));
    std::vector<MatrixXd> est = m.coeffs();
    for (auto& a : est) a += random_matrix(3, 3, rng, 0.05);
    if (spectral_radius(companion(est).a_stack) >= 0.95) continue;
    MatrixXd s = m.sigma() + 0.05 * MatrixXd::Identity(3, 3);
    s(0, 1) += z(rng);
    s(1, 0) = s(0, 1);
    ++pairs;
    for (NormKind k : {NormKind::kOne, NormKind::kInf, NormKind::kTwo}) {
      for (int h : {0, 1, 3}) {
        BoundCheck c = autocov_bound_check(m, est, s, h, k);
        CAPTURE(h);
        CHECK(c.holds());
      }
    }
  }
}

TEST_CASE("inverse spectral density bound") {
  std::mt19937_64 rng(44);
  VarModel m(random_stable(3, 2, rng), random_spd(3, rng));
  const MatrixXd si = m.sigma().inverse();
  BoundCheck zero = inverse_spectral_bound_check(m.coeffs(), si, m.coeffs(), si, NormKind::kOne);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);

  for (int rep = 0; rep < 50; ++rep) {
    VarModel t(random_stable(4, 2, rng), random_spd(4, rng));
    std::vector<MatrixXd> est = t.coeffs();
    for (auto& a : est) a += random_matrix(4, 4, rng, 0.1);
    const MatrixXd ti = t.sigma().inverse();
    MatrixXd ei = ti + random_matrix(4, 4, rng, 0.05);
    ei = (ei + ei.transpose()).eval() / 2;
    for (NormKind k : {NormKind::kOne, NormKind::kInf, NormKind::kTwo}) {
      CHECK(inverse_spectral_bound_check(t.coeffs(), ti, est, ei, k).holds());
    }
  }
}
