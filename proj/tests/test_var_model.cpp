#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sparsevar/errors.hpp"
#include "sparsevar/var_model.hpp"

using namespace sparsevar;

namespace {

VarModel ar1(double a, double s2 = 1.0) {
  return VarModel({MatrixXd::Constant(1, 1, a)}, MatrixXd::Constant(1, 1, s2));
}

MatrixXd random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  MatrixXd m(d, d);
  for (int i = 0; i < m.size(); ++i) m(i) = z(rng);
  return m * m.transpose() / d + MatrixXd::Identity(d, d);
}

VarModel random_stable(int d, int p, double rho, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::vector<MatrixXd> a(p, MatrixXd(d, d));
  for (auto& m : a)
    for (int i = 0; i < m.size(); ++i) m(i) = z(rng);
  const double r = spectral_radius(companion(std::span<const MatrixXd>(a)).a_stack);
  const double c = rho / r;
  double ck = 1.0;
  for (auto& m : a) {
    ck *= c;
    m *= ck;
  }
  return VarModel(a, random_spd(d, rng));
}

}  // namespace

TEST_CASE("companion layout") {
  VarModel m({MatrixXd::Constant(1, 1, 0.5), MatrixXd::Constant(1, 1, 0.25)},
             MatrixXd::Identity(1, 1));
  CompanionForm cf = companion(m);
  MatrixXd expect(2, 2);
  expect << 0.5, 0.25, 1, 0;
  CHECK(cf.a_stack == expect);
  CHECK(cf.embed == (MatrixXd(2, 1) << 1, 0).finished());

  VarModel z({MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 2)}, MatrixXd::Identity(2, 2));
  MatrixXd zz = MatrixXd::Zero(4, 4);
  zz.block(2, 0, 2, 2).setIdentity();
  CHECK(companion(z).a_stack == zz);

  MatrixXd a1 = MatrixXd::Random(3, 3);
  CHECK(companion(VarModel({a1}, MatrixXd::Identity(3, 3))).a_stack == a1);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(VarModel({}, MatrixXd::Identity(2, 2)), DimensionError);
  CHECK_THROWS_AS(VarModel({MatrixXd::Zero(2, 3)}, MatrixXd::Identity(2, 2)),
                  DimensionError);
  MatrixXd asym = MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(VarModel({MatrixXd::Zero(2, 2)}, asym), DataError);
  CHECK_THROWS_AS(TimeSeries(MatrixXd::Constant(2, 2, NAN)), DataError);
}

TEST_CASE("stack and unstack round trip") {
  std::vector<MatrixXd> a{MatrixXd::Random(3, 3), MatrixXd::Random(3, 3)};
  MatrixXd b = stack_coefficients(a);
  CHECK(b.rows() == 6);
  CHECK(b.topRows(3) == a[0].transpose());
  auto back = unstack_coefficients(b, 2);
  CHECK(back[0] == a[0]);
  CHECK(back[1] == a[1]);
}

TEST_CASE("spectral radius") {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = -0.25;
  CHECK(spectral_radius(d) == doctest::Approx(0.5).epsilon(1e-12));
  MatrixXd c(2, 2);
  c << 0.5, 0.25, 1, 0;
  CHECK(std::abs(spectral_radius(c) - (1 + std::sqrt(5.0)) / 4) < 1e-12);
  CHECK(spectral_radius(MatrixXd::Zero(3, 3)) == 0.0);
  MatrixXd rot(2, 2);  // complex dominant pair
  rot << 0, -0.7, 0.7, 0;
  CHECK(std::abs(spectral_radius(rot) - 0.7) < 1e-12);
}

TEST_CASE("autocov closed forms") {
  VarModel m = ar1(0.5);
  CHECK(std::abs(autocov(m, 0)(0, 0) - 4.0 / 3) < 1e-10);
  CHECK(std::abs(autocov(m, 1)(0, 0) - 2.0 / 3) < 1e-10);
  CHECK(std::abs(autocov(m, 2)(0, 0) - 1.0 / 3) < 1e-10);

  MatrixXd sig = MatrixXd::Identity(2, 2);
  sig(0, 1) = sig(1, 0) = 0.3;
  VarModel wn({MatrixXd::Zero(2, 2)}, sig);
  CHECK((autocov(wn, 0) - sig).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(autocov(wn, 1).cwiseAbs().maxCoeff() == 0.0);

  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 0) = 0.5;
  a(1, 1) = 0.9;
  MatrixXd g0 = autocov(VarModel({a}, MatrixXd::Identity(2, 2)), 0);
  CHECK(std::abs(g0(0, 0) - 4.0 / 3) < 1e-10);
  CHECK(std::abs(g0(1, 1) - 1.0 / 0.19) < 1e-9);
  CHECK(std::abs(g0(0, 1)) < 1e-14);
}

TEST_CASE("autocov symmetry and Lyapunov residual") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    VarModel m = random_stable(2 + rep % 5, 1 + rep % 3, 0.9, rng);
    CHECK(autocov(m, -2) == autocov(m, 2).transpose());
    CompanionForm cf = companion(m);
    MatrixXd su = cf.embed * m.sigma() * cf.embed.transpose();
    MatrixXd g = stacked_autocov0(cf.a_stack, su);
    CHECK(lyapunov_residual(cf.a_stack, su, g) <= 1e-8);
  }
}

TEST_CASE("autocov rejects unstable models") {
  CHECK_THROWS_AS(autocov(ar1(1.0), 0), StabilityError);
  try {
    autocov(ar1(1.2), 0);
  } catch (const StabilityError& e) {
    CHECK(e.spectral_radius() == doctest::Approx(1.2));
  }
}

TEST_CASE("spectral density") {
  MatrixXd sig(2, 2);
  sig << 2, 0.5, 0.5, 1;
  VarModel wn({MatrixXd::Zero(2, 2)}, sig);
  MatrixXcd f = spectral_density(wn, 1.3);
  CHECK((f.real() - sig / (2 * std::numbers::pi)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK(std::abs(spectral_density(ar1(0.5), 0.0)(0, 0).real() -
                 2 / std::numbers::pi) < 1e-12);
  CHECK(std::abs(inverse_spectral_density(ar1(0.5).coeffs(),
                                          MatrixXd::Identity(1, 1), 0.0)(0, 0)
                     .real() -
                 std::numbers::pi / 2) < 1e-12);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    VarModel m = random_stable(3, 2, 0.85, rng);
    const MatrixXd sinv = m.sigma().inverse();
    for (double w : {-2.0, 0.0, 0.7, 3.1}) {
      MatrixXcd fw = spectral_density(m, w);
      CHECK((fw - fw.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
      MatrixXcd prod = fw * inverse_spectral_density(m.coeffs(), sinv, w);
      CHECK((prod - MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  CHECK_THROWS_AS(spectral_density(ar1(1.0), 0.0), SingularityError);
  CHECK_THROWS_AS(inverse_spectral_density(ar1(0.5).coeffs(),
                                           MatrixXd::Identity(2, 2), 0.0),
                  DimensionError);
}

TEST_CASE("Riemann sum of spectral density recovers Gamma(0)") {
  std::mt19937_64 rng(9);
  VarModel m = random_stable(3, 2, 0.8, rng);
  const int grid = 4096;
  MatrixXd acc = MatrixXd::Zero(3, 3);
  for (int k = 0; k < grid; ++k) {
    const double w = -std::numbers::pi + 2 * std::numbers::pi * k / grid;
    acc += spectral_density(m, w).real();
  }
  acc *= 2 * std::numbers::pi / grid;
  CHECK((acc - autocov(m, 0)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("simulation") {
  VarModel wn({MatrixXd::Zero(2, 2)}, MatrixXd::Identity(2, 2));
  const int n = 20000;
  TimeSeries x = simulate(wn, n, 0, 3);
  MatrixXd c = x.values().transpose() * x.values() / n;
  CHECK((c - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 5 / std::sqrt(n));

  TimeSeries a = simulate(wn, 50, 10, 99);
  TimeSeries b = simulate(wn, 50, 10, 99);
  CHECK(a.values() == b.values());

  TimeSeries y = simulate(ar1(0.9), 10000, 500, 1);
  VectorXd v = y.values().col(0);
  v.array() -= v.mean();
  const double r1 = v.head(9999).dot(v.tail(9999)) / v.squaredNorm();
  CHECK(std::abs(r1 - 0.9) < 0.1);

  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(0, 1) = bad(1, 0) = 2.0;
  CHECK_THROWS_AS(simulate(VarModel({MatrixXd::Zero(2, 2)}, bad), 10, 0, 1),
                  FactorizationError);
}

TEST_CASE("companion simulation is bit-identical to direct") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    VarModel m = random_stable(3, 1 + rep % 3, 0.9, rng);
    CHECK(simulate(m, 200, 50, rep).values() ==
          simulate_companion(m, 200, 50, rep).values());
  }
}

TEST_CASE("design layout") {
  MatrixXd s(5, 1);
  s << 1, 2, 3, 4, 5;
  TimeSeries ts(s);
  SampleDesign d1 = build_design(ts, 1);
  CHECK(d1.n_eff == 4);
  CHECK(d1.y_mat.col(0) == (VectorXd(4) << 5, 4, 3, 2).finished());
  CHECK(d1.x_mat.col(0) == (VectorXd(4) << 4, 3, 2, 1).finished());
  SampleDesign d2 = build_design(ts, 2);
  CHECK(d2.x_mat(0, 0) == 4);
  CHECK(d2.x_mat(0, 1) == 3);
  CHECK_THROWS_AS(build_design(ts, 5), InsufficientDataError);
}

TEST_CASE("design reconstructs innovations") {
  std::mt19937_64 rng(4);
  VarModel m = random_stable(3, 2, 0.7, rng);
  SimulatedPath path = simulate_path(m, 100, 20, 8);
  SampleDesign des = build_design(path.series, 2);
  MatrixXd e = des.y_mat - des.x_mat * stack_coefficients(m.coeffs());
  // row k of the design corresponds to time n-k (1-based)
  for (int k = 0; k < des.n_eff; ++k) {
    CHECK((e.row(k) - path.innovations.row(99 - k)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forecast") {
  MatrixXd s(2, 2);
  s << 0, 0, 2, -2;
  TimeSeries ts(s);
  std::vector<MatrixXd> a{0.5 * MatrixXd::Identity(2, 2)};
  VectorXd f1 = forecast(a, ts, 1);
  CHECK(f1(0) == 1.0);
  CHECK(f1(1) == -1.0);
  VectorXd f2 = forecast(a, ts, 2);
  CHECK(f2(0) == 0.5);
  CHECK(f2(1) == -0.5);
  std::vector<MatrixXd> z{MatrixXd::Zero(2, 2)};
  CHECK(forecast(z, ts, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(forecast(a, ts, 0), DataError);
}

TEST_CASE("class membership") {
  std::vector<MatrixXd> diag{0.5 * MatrixXd::Identity(3, 3)};
  SparsityClass cls{1, 0.0, 1.0, 0.5, 1};
  CHECK(class_membership(diag, cls).member);

  std::vector<MatrixXd> ones{MatrixXd::Ones(2, 2)};
  MembershipReport rep = class_membership(ones, cls);
  CHECK_FALSE(rep.member);
  CHECK(rep.violated == "row-budget");
  CHECK(rep.lhs == 2.0);

  // M2 membership implies M1 membership
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::bernoulli_distribution keep(0.3);
  int m2_count = 0;
  for (int rep_i = 0; rep_i < 300; ++rep_i) {
    std::vector<MatrixXd> a(2, MatrixXd::Zero(3, 3));
    for (auto& m : a)
      for (int i = 0; i < m.size(); ++i) m(i) = keep(rng) ? u(rng) : 0.0;
    for (double q : {0.0, 0.5}) {
      SparsityClass c2{2, q, 2.0, 2.0, 2};
      SparsityClass c1{1, q, 2.0, 2.0, 2};
      if (class_membership(a, c2).member) {
        ++m2_count;
        CHECK(class_membership(a, c1).member);
      }
    }
  }
  CHECK(m2_count > 20);
  CHECK_THROWS_AS(class_membership(diag, SparsityClass{3, 0, 1, 1, 1}), ConfigError);
}
