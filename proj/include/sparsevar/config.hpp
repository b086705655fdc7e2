#pragma once

// Run configuration: `key = value` lines under optional `[section]` headers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsevar/fit.hpp"
#include "sparsevar/io.hpp"
#include "sparsevar/simlab.hpp"
#include "sparsevar/verify.hpp"

namespace sparsevar {

enum class Command { kSimulate, kEstimate, kBenchmark, kVerify };

Command parse_command(const std::string& text);
std::string command_name(Command c);

/// Shared settings applied to every named estimator.
struct EstimatorOptions {
  std::vector<std::string> names{"Row-Lasso SA BIC"};
  int lambda_grid = 50;
  double lambda_ratio = 0.0;  // 0: method default
  double eric_nu = 1.0;
  std::string threshold_rule = "adaptive:4";
  double threshold_multiplier = 1.0;
  bool reselect_lambda = true;
  int cv_splits = 10;
  int cv_grid = 30;

  std::vector<EstimatorConfig> build() const;
};

/// Source of the true model for `simulate`.
struct ModelSpec {
  std::string source = "example2";  // example1 | example2 | file
  Example1Variant variant = Example1Variant::kDM;
  int d = 10;
  int s = 1;
  double rho = 0.8;
  std::string file;
  int n = 100;
  int burn_in = 500;
};

struct EstimateSpec {
  std::string series;
  std::string truth;  // optional
  int p = 1;
};

/// Scenario grid; list-valued keys are crossed.
struct BenchmarkSpec {
  int example = 1;
  std::vector<Example1Variant> variants{Example1Variant::kDM};
  std::vector<int> d{10};
  std::vector<int> s{1};
  std::vector<double> rho{0.8};
  std::vector<int> n{100};
  int replications = 100;
  int horizon = 1;
  int burn_in = 500;
  NormKind norm = NormKind::kInf;
  int n_freq = 512;
  bool redraw = false;

  std::vector<Scenario> scenarios(std::uint64_t seed) const;
};

struct RunConfig {
  Command command = Command::kVerify;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out = ".";
  EstimatorOptions estimators;
  ModelSpec model;
  EstimateSpec estimate;
  BenchmarkSpec benchmark;
  VerifyOptions verify;

  /// Effective configuration, one `section.key = value` line per key.
  /// Thread count and output directory are left out: they do not change
  /// results.
  std::vector<std::string> canonical() const;
  /// FNV-1a 64 of the canonical lines, as 16 hex digits.
  std::string hash() const;
  /// Comment lines written at the top of every output file.
  Provenance provenance() const;
};

/// Values given on the command line; they take precedence over the file.
struct CliOverrides {
  std::optional<Command> command;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

/// Parses and validates. Errors are ConfigError messages of the form
/// "<origin>:<line>: ...".
RunConfig parse_config(const std::string& text, const std::string& origin = "config",
                       const CliOverrides& overrides = {});

/// Closest candidate by edit distance to a prefix of the candidate, ties
/// broken by full edit distance; empty when nothing is close.
std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates);

std::uint64_t fnv1a64(const std::string& data);

extern const char* const kVersion;

}  // namespace sparsevar
