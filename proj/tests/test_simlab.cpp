#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <limits>
#include <sstream>

#include "sparsevar/errors.hpp"
#include "sparsevar/seeding.hpp"
#include "sparsevar/simlab.hpp"

using namespace sparsevar;

namespace {

int max_row_count(const std::vector<MatrixXd>& a) {
  int best = 0;
  for (int i = 0; i < a[0].rows(); ++i) {
    int c = 0;
    for (const auto& m : a) c += static_cast<int>((m.row(i).array() != 0.0).count());
    best = std::max(best, c);
  }
  return best;
}

int max_col_count(const std::vector<MatrixXd>& a) {
  int best = 0;
  for (int j = 0; j < a[0].cols(); ++j) {
    int c = 0;
    for (const auto& m : a) c += static_cast<int>((m.col(j).array() != 0.0).count());
    best = std::max(best, c);
  }
  return best;
}

std::vector<double> eigenvalues(const MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace

TEST_CASE("dense generator only rescales") {
  const std::uint64_t seed = 3;
  const MatrixXd a = random_sparse_var1(2, 2, 0.7, seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  MatrixXd draw(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) draw(i, j) = z(rng);
  draw *= 0.7 / spectral_radius(draw);
  CHECK((a - draw).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(spectral_radius(a) - 0.7) < 1e-12);
}

TEST_CASE("sparse VAR(1) budgets and radius") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (int s : {1, 3, 5}) {
      const double rho = 0.6 + 0.01 * seed;
      const MatrixXd a = random_sparse_var1(10, s, rho, seed);
      CHECK(max_row_count({a}) <= s);
      CHECK(max_col_count({a}) <= s);
      CHECK(std::abs(spectral_radius(a) - rho) < 1e-8);
    }
  }
}

TEST_CASE("nilpotent sparse draw falls back to the (1,1) entry") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 200 && hits < 3; ++seed) {
    bool fallback = false;
    const MatrixXd a = random_sparse_var1(2, 1, 0.8, seed, &fallback);
    if (!fallback) continue;
    ++hits;
    CHECK(std::abs(a(0, 0) - 0.8) < 1e-12);
    CHECK(max_row_count({a}) <= 1);
    CHECK(max_col_count({a}) <= 1);
    CHECK(std::abs(spectral_radius(a) - 0.8) < 1e-12);
  }
  CHECK(hits > 0);
}

TEST_CASE("sparse VAR(p)") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(random_sparse_varp(6, 2, 0.5, 1, seed).front() == random_sparse_var1(6, 2, 0.5, seed));
    const auto a = random_sparse_varp(8, 3, 0.9, 3, seed);
    CHECK(a.size() == 3);
    CHECK(max_row_count(a) <= 3);
    CHECK(max_col_count(a) <= 3);
    CHECK(std::abs(spectral_radius(companion(a).a_stack) - 0.9) < 1e-6);
    SparsityClass cls;
    cls.variant = 2;
    cls.s = 3;
    cls.p = 3;
    cls.m_bound = 1e6;
    CHECK(class_membership(a, cls).member);
  }
  CHECK_THROWS_AS(random_sparse_varp(4, 0, 0.5, 1, 1), ConfigError);
  CHECK_THROWS_AS(random_sparse_varp(4, 2, 1.0, 1, 1), ConfigError);
}

TEST_CASE("example 1 innovation covariances") {
  CHECK(example1_sigma(Example1Variant::kDM) == MatrixXd::Identity(14, 14));
  const MatrixXd dt = example1_sigma(Example1Variant::kDT);
  CHECK(dt(0, 0) == 1.88e-2);
  CHECK(dt(13, 13) == 2.03e-6);
  CHECK(dt.isDiagonal(0));
  const auto fm = eigenvalues(example1_sigma(Example1Variant::kFM));
  CHECK(std::abs(fm[0] - 0.21) < 1e-6);
  CHECK(std::abs(fm[1] - 2.5) < 1e-6);
  const MatrixXd ft = example1_sigma(Example1Variant::kFT);
  CHECK(((ft.diagonal() - dt.diagonal()).array() / dt.diagonal().array()).abs().maxCoeff() < 1e-14);
  const auto fte = eigenvalues(ft);
  MESSAGE("FT eigenvalue extremes " << fte[0] << " / " << fte[1]);
  CHECK(fte[0] > 0.0);
  CHECK(parse_example1_variant("ft") == Example1Variant::kFT);
  CHECK_THROWS_AS(parse_example1_variant("XX"), ConfigError);
}

TEST_CASE("example 1 coefficients match the frozen data") {
  const auto a = example1_coefficients();
  CHECK(a.size() == 4);
  CHECK(max_row_count(a) <= 5);
  CHECK(max_col_count(a) <= 5);
  CHECK(std::abs(spectral_radius(companion(a).a_stack) - 0.8) < 1e-8);
  for (const char* v : {"DM", "DT", "FM", "FT"}) {
    const VarModel m = load_model(std::string(SPARSEVAR_DATA_DIR) + "/example1_" + v + ".model");
    CAPTURE(v);
    for (int k = 0; k < 4; ++k) CHECK(m.coeffs()[k] == a[k]);
    CHECK(m.sigma() == example1_sigma(parse_example1_variant(v)));
  }
}

TEST_CASE("aggregation is order free") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> v(200);
  for (auto& x : v) x = std::exp(z(rng));
  v[5] = std::numeric_limits<double>::quiet_NaN();
  v[9] = std::numeric_limits<double>::infinity();
  const Aggregate a = aggregate(v);
  CHECK(a.failures == 2);
  CHECK(a.count == 198);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(v.begin(), v.end(), rng);
    const Aggregate b = aggregate(v);
    CHECK(b.mean == a.mean);
    CHECK(b.se == a.se);
  }
  const Aggregate none = aggregate({std::nan("")});
  CHECK(std::isnan(none.mean));
  CHECK(none.failures == 1);
}

TEST_CASE("replication seeds are distinct and reproducible") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 10000; ++r) seen.insert(derive_seed(42, r));
  CHECK(seen.size() == 10000);
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  CHECK(derive_seed(42, 7) != derive_seed(43, 7));
}

TEST_CASE("oracle estimator has zero error") {
  Scenario sc;
  sc.example1 = false;
  sc.d = 5;
  sc.s = 2;
  sc.rho = 0.7;
  sc.replications = 1;
  sc.n = 50;
  const VarModel truth = scenario_model(sc);
  BenchmarkResult r = run_monte_carlo(sc, {oracle_candidate(truth)});
  for (const char* c : {"param", "gamma", "spectral"}) {
    CHECK(r.find(sc.label(), "oracle", c).agg.mean == 0.0);
  }
  CHECK(std::isfinite(r.find(sc.label(), "oracle", "forecast").agg.mean));
}

TEST_CASE("example 2 keeps one matrix per cell unless redrawn") {
  Scenario sc;
  sc.example1 = false;
  sc.d = 6;
  sc.s = 2;
  CHECK(scenario_model(sc).coeff(1) == scenario_model(sc, 99).coeff(1));
  Scenario other = sc;
  other.rho = 0.6;
  CHECK(scenario_model(sc).coeff(1) != scenario_model(other).coeff(1));
  sc.redraw = true;
  CHECK(scenario_model(sc, 1).coeff(1) != scenario_model(sc, 2).coeff(1));
}

TEST_CASE("benchmark is deterministic across thread counts") {
  Scenario sc;
  sc.example1 = false;
  sc.d = 4;
  sc.s = 1;
  sc.n = 60;
  sc.replications = 6;
  sc.seed = 11;
  std::vector<Candidate> cands{make_candidate(parse_estimator_name("Row-Lasso SA BIC")),
                               make_candidate(parse_estimator_name("Vec-Lasso SA ERIC"))};
  std::ostringstream a, b;
  write_benchmark_csv(a, run_monte_carlo(sc, cands, 1));
  write_benchmark_csv(b, run_monte_carlo(sc, cands, 3));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("scenario,estimator,criterion,mean,se,failures,R,seed\n", 0) == 0);
}

TEST_CASE("failing replications are logged and the run continues") {
  Scenario sc;
  sc.example1 = false;
  sc.d = 3;
  sc.s = 1;
  sc.n = 40;
  sc.replications = 8;
  Candidate flaky;
  flaky.label = "flaky";
  const VarModel truth = scenario_model(sc);
  flaky.fit = [truth](const TimeSeries& x, int, std::uint64_t) {
    if (x.values()(0, 0) > 0) throw NumericError("refused");
    return Fitted{truth.coeffs(), truth.sigma()};
  };
  BenchmarkResult r = run_monte_carlo(sc, {flaky}, 2);
  const Aggregate g = r.find(sc.label(), "flaky", "param").agg;
  CHECK(g.failures == static_cast<int>(r.failures.size()));
  CHECK(g.failures + g.count == 8);
  CHECK(g.failures > 0);
  CHECK(g.count > 0);
  for (const auto& f : r.failures) {
    CHECK(f.estimator == "flaky");
    CHECK(f.message == "refused");
  }
}
