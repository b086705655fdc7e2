#include "sparsevar/thresholding.hpp"

#include <cmath>
#include <limits>

#include "sparsevar/errors.hpp"

namespace sparsevar {

double ThresholdRule::c_const() const {
  switch (kind) {
    case ThresholdKind::kSoft:
      return 1.0;
    case ThresholdKind::kAdaptive:
      return nu;
    case ThresholdKind::kHard:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void ThresholdRule::validate() const {
  if (kind == ThresholdKind::kAdaptive && !(nu >= 1.0)) {
    throw ConfigError("adaptive thresholding needs nu >= 1");
  }
}

std::string ThresholdRule::name() const {
  switch (kind) {
    case ThresholdKind::kSoft:
      return "soft";
    case ThresholdKind::kAdaptive: {
      std::string s = std::to_string(nu);
      s.erase(s.find_last_not_of('0') + 1);
      if (s.back() == '.') s.pop_back();
      return "adaptive:" + s;
    }
    case ThresholdKind::kHard:
      return "hard";
  }
  return "?";
}

ThresholdRule parse_threshold_rule(const std::string& text) {
  if (text == "soft") return ThresholdRule::soft();
  if (text == "hard") return ThresholdRule::hard();
  if (text == "adaptive") return ThresholdRule::adaptive();
  if (text.rfind("adaptive:", 0) == 0) {
    const std::string num = text.substr(9);
    char* end = nullptr;
    const double nu = std::strtod(num.c_str(), &end);
    if (num.empty() || *end != '\0') {
      throw ConfigError("bad adaptive exponent in '" + text + "'");
    }
    ThresholdRule r = ThresholdRule::adaptive(nu);
    r.validate();
    return r;
  }
  throw ConfigError("unknown threshold rule '" + text +
                    "' (expected soft, hard, adaptive[:nu])");
}

double threshold_scalar(const ThresholdRule& rule, double lambda, double z) {
  const double az = std::abs(z);
  switch (rule.kind) {
    case ThresholdKind::kSoft:
      return az > lambda ? std::copysign(az - lambda, z) : 0.0;
    case ThresholdKind::kAdaptive:
      if (az <= lambda) return lambda == 0.0 ? z : 0.0;
      return z * (1.0 - std::pow(lambda / az, rule.nu));
    case ThresholdKind::kHard:
      return az > lambda ? z : 0.0;
  }
  return z;
}

MatrixXd threshold_matrix(const ThresholdRule& rule, double lambda,
                          const MatrixXd& m) {
  return m.unaryExpr(
      [&](double z) { return threshold_scalar(rule, lambda, z); });
}

RuleConditionReport verify_rule_conditions(const ThresholdRule& rule,
                                           double lambda,
                                           std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("verify_rule_conditions: empty grid");
  double c = rule.c_const();
  if (std::isnan(c)) c = 1.0;
  const double slack = 1e-12;
  RuleConditionReport rep;
  const auto fail = [&](int cond, double z, double y) {
    rep = {false, cond, z, y};
  };
  for (double z : grid) {
    const double t = threshold_scalar(rule, lambda, z);
    if (std::abs(z) <= lambda && t != 0.0 && lambda > 0.0) {
      fail(2, z, z);
      return rep;
    }
    if (std::abs(t - z) > lambda + slack) {
      fail(3, z, z);
      return rep;
    }
    for (double y : grid) {
      if (std::abs(z - y) > lambda) continue;
      if (std::abs(t) > c * std::abs(y) + slack) {
        fail(1, z, y);
        return rep;
      }
    }
  }
  return rep;
}

double theorem1_bound(const SparsityClass& cls, double c_const, double t_n) {
  if (!(t_n > 0.0)) throw ConfigError("theorem1_bound: t_n must be positive");
  return (4.0 + c_const) * cls.s * std::pow(t_n, 1.0 - cls.q);
}

Theorem1Errors theorem1_errors(std::span<const MatrixXd> truth,
                               std::span<const MatrixXd> estimate,
                               const ThresholdRule& rule, double lambda) {
  if (truth.size() != estimate.size()) {
    throw DimensionError("theorem1_errors: lag orders differ");
  }
  const auto d = truth.front().rows();
  const auto p = static_cast<Eigen::Index>(truth.size());
  // Only the top block row of the companion differences is nonzero.
  MatrixXd top(d, d * p);
  for (Eigen::Index k = 0; k < p; ++k) {
    top.middleCols(k * d, d) =
        truth[k] - threshold_matrix(rule, lambda, estimate[k]);
  }
  Theorem1Errors out;
  out.err_one = top.cwiseAbs().colwise().sum().maxCoeff();
  out.err_inf = top.cwiseAbs().rowwise().sum().maxCoeff();
  return out;
}

}  // namespace sparsevar
