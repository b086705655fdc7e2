#pragma once

// Data-generating processes of the two simulation examples and the
// Monte-Carlo benchmark driver.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsevar/fit.hpp"
#include "sparsevar/io.hpp"
#include "sparsevar/metrics.hpp"

namespace sparsevar {

/// Four-step sparse generator: Gaussian draw scaled to spectral radius 0.9,
/// top-s entries per row, top-s per column, rescale to spectral radius rho.
/// When the sparse matrix is nilpotent, entry (1,1) is set to rho first;
/// `fallback` reports that branch.
MatrixXd random_sparse_var1(int d, int s, double rho, std::uint64_t seed,
                            bool* fallback = nullptr);

/// Same procedure on B = (A_1, ..., A_p) with row and column counts summed
/// across lags; the companion spectral radius is set through A_k <- c^k A_k.
std::vector<MatrixXd> random_sparse_varp(int d, int s, double rho, int p,
                                         std::uint64_t seed,
                                         bool* fallback = nullptr);

enum class Example1Variant { kDM, kDT, kFM, kFT };

Example1Variant parse_example1_variant(const std::string& text);
std::string variant_name(Example1Variant v);

constexpr int kExample1Dim = 14;
constexpr int kExample1Order = 4;
constexpr int kExample1Sparsity = 5;
constexpr double kExample1Radius = 0.8;
constexpr std::uint64_t kExample1Seed = 20190611;

/// Heterogeneous variances of the DT/FT variants.
VectorXd example1_variances();
/// Equicorrelation matrix with eigenvalue ratio 2.5 / 0.21.
MatrixXd example1_correlation();
MatrixXd example1_sigma(Example1Variant v);
/// random_sparse_varp(14, 5, 0.8, 4, kExample1Seed).
std::vector<MatrixXd> example1_coefficients();

/// What an estimator hands to the criteria: coefficients and an innovation
/// covariance estimate.
struct Fitted {
  std::vector<MatrixXd> coeffs;
  MatrixXd sigma;
};

struct Candidate {
  std::string label;
  std::function<Fitted(const TimeSeries& series, int p, std::uint64_t seed)> fit;
};

/// Wraps a pipeline configuration. Sigma is the soft-thresholded residual
/// covariance with cross-validated level, the CV stream seeded per call.
Candidate make_candidate(const EstimatorConfig& config);
/// Returns the true coefficients and covariance.
Candidate oracle_candidate(const VarModel& truth);

struct Scenario {
  std::string name;
  bool example1 = true;
  Example1Variant variant = Example1Variant::kDM;
  int d = 10;  // example 2
  int s = 1;
  double rho = 0.8;
  bool redraw = false;  // example 2: new A per replication
  int n = 100;
  int replications = 100;
  int burn_in = 500;
  int horizon = 1;
  std::uint64_t seed = 1;
  NormKind norm = NormKind::kInf;
  int n_freq = 512;

  void validate() const;
  /// `name`, or a label built from the design when empty.
  std::string label() const;
  int order() const { return example1 ? kExample1Order : 1; }
};

/// True model of a scenario; for example 2 the coefficient draw is keyed
/// by (seed, d, s, rho) or, with `redraw`, by the replication seed.
VarModel scenario_model(const Scenario& sc, std::uint64_t replication_seed = 0);

inline const char* const kCriteria[] = {"param", "gamma", "spectral", "forecast"};
constexpr int kNumCriteria = 4;

struct Aggregate {
  double mean = 0.0;
  double se = 0.0;
  int failures = 0;  // fits that threw plus non-finite values
  int count = 0;     // finite values averaged
};

struct BenchmarkRow {
  std::string scenario;
  std::string estimator;
  std::string criterion;
  Aggregate agg;
  int replications = 0;
  std::uint64_t seed = 0;
};

struct ReplicationFailure {
  std::string estimator;
  std::uint64_t seed = 0;
  std::string message;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<ReplicationFailure> failures;

  const BenchmarkRow& find(const std::string& scenario, const std::string& estimator,
                           const std::string& criterion) const;
};

/// Order-free mean and standard error of the finite entries; non-finite
/// entries (including failed fits, stored as NaN) are counted as failures.
Aggregate aggregate(std::vector<double> values);

BenchmarkResult run_monte_carlo(const Scenario& sc,
                                const std::vector<Candidate>& candidates,
                                int threads = 1);

void write_benchmark_csv(std::ostream& os, const BenchmarkResult& result,
                         const Provenance& header = {});

}  // namespace sparsevar
