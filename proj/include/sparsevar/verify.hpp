#pragma once

// Oracle and property suite behind the `verify` command.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsevar/var_model.hpp"

namespace sparsevar {

struct CheckResult {
  std::string name;
  bool pass = true;
  long cases = 0;
  long failures = 0;
  double worst = 0.0;  // largest error statistic (lhs / rhs for bounds)
  double seconds = 0.0;
  std::string detail;  // first failing case, if any
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int models = 100;       // Lyapunov and spectral model set
  int lp_problems = 500;
  int threshold_sets = 50;
  int perturbations = 20;
  int bound_pairs = 50;
  int spectral_points = 4096;
};

/// Random stable VAR(p), d <= 20, p <= 4, radius <= 0.95, dense SPD Sigma.
std::vector<VarModel> random_stable_models(std::uint64_t seed, int count);

CheckResult check_lyapunov(const VerifyOptions& opts);
CheckResult check_spectral_identity(const VerifyOptions& opts);
CheckResult check_estimator_certificates(const VerifyOptions& opts);
CheckResult check_lp_oracle(const VerifyOptions& opts);
CheckResult check_theorem1(const VerifyOptions& opts);
CheckResult check_autocov_bound(const VerifyOptions& opts);
CheckResult check_inverse_spectral_bound(const VerifyOptions& opts);

std::vector<CheckResult> run_verify(const VerifyOptions& opts = {});

/// CSV, one line per check: status, name, cases, failures, worst, detail.
/// Timings are left out so reports are reproducible.
void write_verify_report(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace sparsevar
