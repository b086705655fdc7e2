#include <doctest.h>

#include <cmath>

#include "sparsevar/errors.hpp"
#include "sparsevar/fit.hpp"
#include "sparsevar/simlab.hpp"

using namespace sparsevar;

namespace {

VarModel sparse_model() {
  MatrixXd a = MatrixXd::Zero(4, 4);
  a(0, 0) = 0.6;
  a(1, 1) = -0.5;
  a(2, 0) = 0.4;
  a(3, 3) = 0.3;
  MatrixXd s = MatrixXd::Identity(4, 4);
  s(0, 0) = 2.0;
  s(1, 1) = 0.5;
  return VarModel({a}, s);
}

}  // namespace

TEST_CASE("estimator names") {
  EstimatorConfig c = parse_estimator_name("Row-Lasso TSA BIC");
  CHECK(c.method == Method::kRowLasso);
  CHECK(c.threshold);
  CHECK(c.standardize);
  CHECK(c.adaptive);
  CHECK(c.name() == "Row-Lasso TSA BIC");
  CHECK(parse_estimator_name("Vec-Lasso AS ERIC").name() == "Vec-Lasso SA ERIC");
  CHECK(parse_estimator_name("Row-Dantzig BIC").name() == "Row-Dantzig BIC");
  CHECK(parse_estimator_name("Row-Dantzig BIC").effective_ratio() == 0.01);
  CHECK_THROWS_AS(parse_estimator_name("Row-Lasso TT BIC"), ConfigError);
  CHECK_THROWS_AS(parse_estimator_name("Ridge BIC"), ConfigError);
}

TEST_CASE("plain Row-Lasso on white noise stays near zero") {
  VarModel wn({MatrixXd::Zero(3, 3)}, MatrixXd::Identity(3, 3));
  EstimatorConfig cfg;
  int small = 0;
  for (int rep = 0; rep < 200; ++rep) {
    TimeSeries x = simulate(wn, 400, 0, 500 + rep);
    VarEstimate e = fit(cfg, x, 1);
    if (e.b_hat.cwiseAbs().maxCoeff() <= 0.15) ++small;
  }
  MESSAGE("max |B| <= 0.15 in " << small << "/200");
  CHECK(small >= 190);
}

TEST_CASE("standardization on pre-standardized data matches plain") {
  VarModel m = sparse_model();
  TimeSeries raw = simulate(m, 300, 100, 17);
  MatrixXd v = raw.values();
  for (int j = 0; j < v.cols(); ++j) {
    const double mean = v.col(j).mean();
    const double sd = std::sqrt((v.col(j).array() - mean).square().sum() / (v.rows() - 1));
    v.col(j) /= sd;
  }
  TimeSeries unit(v);
  EstimatorConfig plain;
  EstimatorConfig st = plain;
  st.standardize = true;
  VarEstimate a = fit(plain, unit, 1);
  VarEstimate b = fit(st, unit, 1);
  CHECK((a.b_hat - b.b_hat).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("standardized pipeline is invariant to component scaling") {
  VarModel m = sparse_model();
  TimeSeries raw = simulate(m, 200, 100, 23);
  MatrixXd v = raw.values();
  v.col(0) *= 10.0;
  TimeSeries scaled(v);
  for (const char* name : {"Row-Lasso SA BIC", "Row-Lasso TSA ERIC", "Row-Dantzig SA BIC",
                           "Vec-Lasso SA ERIC"}) {
    EstimatorConfig cfg = parse_estimator_name(name);
    VarEstimate a = fit(cfg, raw, 1);
    VarEstimate b = fit(cfg, scaled, 1);
    // undo the scaling of component 1: A' = D A D^-1
    MatrixXd a1 = a.coeffs()[0];
    MatrixXd b1 = b.coeffs()[0];
    b1.row(0) /= 10.0;
    b1.col(0) *= 10.0;
    CAPTURE(name);
    CHECK((a1 - b1).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("every method recovers a sparse model") {
  VarModel m = sparse_model();
  TimeSeries x = simulate(m, 400, 100, 5);
  for (const char* name : {"Row-Lasso BIC", "Row-Lasso TSA BIC", "Vec-Lasso SA ERIC",
                           "Row-Dantzig TSA BIC", "Vec-Lasso TSA BIC"}) {
    VarEstimate e = fit(parse_estimator_name(name), x, 1);
    CAPTURE(name);
    CHECK(e.failures.empty());
    CHECK((e.coeffs()[0] - m.coeff(1)).cwiseAbs().maxCoeff() < 0.2);
    CHECK(e.lambdas.size() == 4);
    CHECK(e.provenance.front() == std::string("estimator=") + name);
  }
}

TEST_CASE("row failures are recorded without aborting") {
  VarModel m = sparse_model();
  TimeSeries x = simulate(m, 100, 100, 5);
  EstimatorConfig cfg;
  cfg.cd.kkt_tol = -1.0;  // no certificate can be produced
  VarEstimate e = fit(cfg, x, 1);
  CHECK(e.failures.size() == 4);
  CHECK(e.b_hat.isZero(0));
}

TEST_CASE("hard thresholding is flagged") {
  VarModel m = sparse_model();
  TimeSeries x = simulate(m, 200, 100, 5);
  EstimatorConfig cfg = parse_estimator_name("Row-Lasso T BIC");
  cfg.threshold_rule = ThresholdRule::hard();
  VarEstimate e = fit(cfg, x, 1);
  bool flagged = false;
  for (const auto& line : e.provenance) flagged |= line.find("warning") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("vec-lasso thresholding keeps the fit under heterogeneous variances") {
  const VarModel m(example1_coefficients(), example1_sigma(Example1Variant::kDT));
  const TimeSeries x = simulate(m, 100, 500, 3);
  const VarEstimate sa = fit(parse_estimator_name("Vec-Lasso SA ERIC"), x, 4);
  const VarEstimate tsa = fit(parse_estimator_name("Vec-Lasso TSA ERIC"), x, 4);
  const auto nnz = [](const MatrixXd& b) { return (b.array() != 0.0).count(); };
  CHECK(nnz(sa.b_hat) > 0);
  CHECK(nnz(tsa.b_hat) >= nnz(sa.b_hat) / 2);
  CHECK((tsa.b_hat - sa.b_hat).cwiseAbs().maxCoeff() < 0.5 * sa.b_hat.cwiseAbs().maxCoeff());
}
