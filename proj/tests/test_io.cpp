#include <doctest.h>

#include <sstream>

#include "sparsevar/errors.hpp"
#include "sparsevar/io.hpp"

using namespace sparsevar;

TEST_CASE("series csv round trip is exact") {
  MatrixXd v(3, 2);
  v << 0.1, -1.0 / 3.0, 1e-300, 123456789.123456789, -0.0, 2.0 / 7.0;
  std::stringstream ss;
  write_series_csv(ss, TimeSeries(v), {"seed 7"});
  const std::string text = ss.str();
  CHECK(text.rfind("# seed 7\nt,x1,x2\n1,", 0) == 0);
  TimeSeries back = read_series_csv(ss);
  CHECK(back.values() == v);
}

TEST_CASE("series csv errors") {
  std::stringstream bad_header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_series_csv(bad_header), DataError);
  std::stringstream ragged("t,x1,x2\n1,2\n");
  CHECK_THROWS_AS(read_series_csv(ragged), DimensionError);
  std::stringstream junk("t,x1\n1,abc\n");
  CHECK_THROWS_AS(read_series_csv(junk), DataError);
}

TEST_CASE("model file round trip") {
  std::vector<MatrixXd> a{MatrixXd::Random(3, 3), MatrixXd::Random(3, 3)};
  MatrixXd s = MatrixXd::Identity(3, 3);
  s(0, 2) = s(2, 0) = 0.1 / 3;
  VarModel m(a, s);
  std::stringstream ss;
  write_model(ss, m, {"hash abc"});
  CHECK(ss.str().rfind("# var-model v1\n# hash abc\np=2\nd=3\nA1:\n", 0) == 0);
  VarModel back = read_model(ss);
  CHECK(back.coeff(1) == a[0]);
  CHECK(back.coeff(2) == a[1]);
  CHECK(back.sigma() == s);

  std::stringstream missing("p=1\nd=1\nA1:\n0\nSigma:\n1\n");
  CHECK_THROWS_AS(read_model(missing), DataError);
  std::stringstream short_row("# var-model v1\np=1\nd=2\nA1:\n0 0\n0\nSigma:\n1 0\n0 1\n");
  CHECK_THROWS_AS(read_model(short_row), DimensionError);
}
