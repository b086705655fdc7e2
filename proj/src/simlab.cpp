#include "sparsevar/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "sparsevar/errors.hpp"
#include "sparsevar/seeding.hpp"

namespace sparsevar {

namespace {

constexpr double kNilpotent = 1e-8;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double companion_radius(const std::vector<MatrixXd>& a) {
  return spectral_radius(companion(a).a_stack);
}

// A_k <- c^k A_k multiplies the companion spectrum by c.
void scale_lags(std::vector<MatrixXd>& a, double c) {
  double f = 1.0;
  for (auto& m : a) {
    f *= c;
    m *= f;
  }
}

struct Slot {
  int lag, row, col;
};

// Keeps the s largest magnitudes among `slots`; ties go to the earlier slot.
void keep_top(std::vector<MatrixXd>& a, const std::vector<Slot>& slots, int s) {
  std::vector<int> order(slots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const auto mag = [&](int i) {
    return std::abs(a[slots[i].lag](slots[i].row, slots[i].col));
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return mag(x) > mag(y); });
  for (std::size_t r = s; r < order.size(); ++r) {
    const Slot& sl = slots[order[r]];
    a[sl.lag](sl.row, sl.col) = 0.0;
  }
}

std::vector<Slot> row_slots(int d, int p, int i) {
  std::vector<Slot> out;
  for (int k = 0; k < p; ++k)
    for (int j = 0; j < d; ++j) out.push_back({k, i, j});
  return out;
}

std::vector<Slot> col_slots(int d, int p, int j) {
  std::vector<Slot> out;
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < d; ++i) out.push_back({k, i, j});
  return out;
}

// Drops the smallest entries of `slots` other than (0, 0, 0) until at most
// s nonzeros remain.
void trim_budget(std::vector<MatrixXd>& a, const std::vector<Slot>& slots, int s) {
  std::vector<Slot> others;
  int nnz = 0;
  for (const Slot& sl : slots) {
    if (a[sl.lag](sl.row, sl.col) == 0.0) continue;
    ++nnz;
    if (sl.lag != 0 || sl.row != 0 || sl.col != 0) others.push_back(sl);
  }
  std::stable_sort(others.begin(), others.end(), [&](const Slot& x, const Slot& y) {
    return std::abs(a[x.lag](x.row, x.col)) < std::abs(a[y.lag](y.row, y.col));
  });
  for (std::size_t i = 0; nnz > s && i < others.size(); ++i, --nnz) {
    a[others[i].lag](others[i].row, others[i].col) = 0.0;
  }
}

std::uint64_t cell_key(int d, int s, double rho) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(d));
  h = splitmix64(h ^ static_cast<std::uint64_t>(s));
  return splitmix64(h ^ std::bit_cast<std::uint64_t>(rho));
}

std::string lower(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<MatrixXd> random_sparse_varp(int d, int s, double rho, int p,
                                         std::uint64_t seed, bool* fallback) {
  if (d < 1 || p < 1) throw ConfigError("random_sparse_varp: d and p must be positive");
  if (s < 1 || s > d * p) throw ConfigError("random_sparse_varp: s out of range");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("random_sparse_varp: rho must lie in (0,1)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<MatrixXd> a(p, MatrixXd(d, d));
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a[k](i, j) = normal(rng);

  const double r0 = companion_radius(a);
  if (r0 > 0.0) scale_lags(a, 0.9 / r0);

  for (int i = 0; i < d; ++i) keep_top(a, row_slots(d, p, i), s);
  for (int j = 0; j < d; ++j) keep_top(a, col_slots(d, p, j), s);

  // A draw whose radius cannot be resolved after rescaling (tiny relative to
  // its entries) is treated as nilpotent.
  const auto rescaled = [rho](std::vector<MatrixXd> m) -> std::optional<std::vector<MatrixXd>> {
    const double r = companion_radius(m);
    if (r < kNilpotent) return std::nullopt;
    scale_lags(m, rho / r);
    if (std::abs(companion_radius(m) - rho) > 1e-8) return std::nullopt;
    return m;
  };
  auto out = rescaled(a);
  if (fallback) *fallback = !out;
  if (!out) {
    a[0](0, 0) = rho;
    trim_budget(a, row_slots(d, p, 0), s);
    trim_budget(a, col_slots(d, p, 0), s);
    out = rescaled(a);
    if (!out) {
      for (auto& m : a) m.setZero();
      a[0](0, 0) = rho;
      out = a;
    }
  }
  a = std::move(*out);

  SparsityClass cls;
  cls.variant = 2;
  cls.s = s;
  cls.p = p;
  cls.m_bound = std::numeric_limits<double>::max();
  const MembershipReport rep = class_membership(a, cls);
  if (!rep.member) throw InternalError("random_sparse_varp: budget violated (" + rep.violated + ")");
  const double achieved = companion_radius(a);
  if (std::abs(achieved - rho) > 1e-8) {
    throw InternalError("random_sparse_varp: spectral radius " + std::to_string(achieved));
  }
  return a;
}

MatrixXd random_sparse_var1(int d, int s, double rho, std::uint64_t seed,
                            bool* fallback) {
  return random_sparse_varp(d, s, rho, 1, seed, fallback).front();
}

Example1Variant parse_example1_variant(const std::string& text) {
  const std::string t = lower(text);
  if (t == "dm") return Example1Variant::kDM;
  if (t == "dt") return Example1Variant::kDT;
  if (t == "fm") return Example1Variant::kFM;
  if (t == "ft") return Example1Variant::kFT;
  throw ConfigError("unknown variant '" + text + "' (expected DM, DT, FM or FT)");
}

std::string variant_name(Example1Variant v) {
  switch (v) {
    case Example1Variant::kDM: return "DM";
    case Example1Variant::kDT: return "DT";
    case Example1Variant::kFM: return "FM";
    case Example1Variant::kFT: return "FT";
  }
  return "?";
}

VectorXd example1_variances() {
  VectorXd v(kExample1Dim);
  v << 1.88e-2, 2.61e-3, 4.40e-3, 3.04e-6, 1.58e-6, 3.99e-3, 1.51e-5, 2.51e-5,
      1.34e-6, 1.03e-2, 4.32e-3, 9.77e-6, 3.93e-5, 2.03e-6;
  return v;
}

MatrixXd example1_correlation() {
  const int d = kExample1Dim;
  const double ratio = 2.5 / 0.21;
  const double alpha = (ratio - 1.0) / (d - 1.0 + ratio);
  MatrixXd c = MatrixXd::Constant(d, d, alpha);
  c.diagonal().setOnes();
  return c;
}

MatrixXd example1_sigma(Example1Variant v) {
  const int d = kExample1Dim;
  switch (v) {
    case Example1Variant::kDM:
      return MatrixXd::Identity(d, d);
    case Example1Variant::kDT:
      return example1_variances().asDiagonal();
    case Example1Variant::kFM: {
      const MatrixXd c = example1_correlation();
      const double alpha = c(0, 1);
      return c * (0.21 / (1.0 - alpha));
    }
    case Example1Variant::kFT: {
      const VectorXd sd = example1_variances().cwiseSqrt();
      return sd.asDiagonal() * example1_correlation() * sd.asDiagonal();
    }
  }
  throw InternalError("example1_sigma: unknown variant");
}

std::vector<MatrixXd> example1_coefficients() {
  static const std::vector<MatrixXd> coeffs = random_sparse_varp(
      kExample1Dim, kExample1Sparsity, kExample1Radius, kExample1Order, kExample1Seed);
  return coeffs;
}

Candidate make_candidate(const EstimatorConfig& config) {
  config.validate();
  Candidate c;
  c.label = config.display();
  c.fit = [config](const TimeSeries& series, int p, std::uint64_t seed) {
    const VarEstimate e = fit(config, series, p);
    if (!e.failures.empty()) {
      throw NumericError("row " + std::to_string(e.failures.front().row + 1) + ": " +
                         e.failures.front().message);
    }
    CvSpec cv = config.cov_cv;
    cv.seed = seed;
    const ResidualMatrix res = residuals(series, e.b_hat, p, true);
    return Fitted{e.coeffs(), thresholded_cov(res, ThresholdRule::soft(), cv).cov};
  };
  return c;
}

Candidate oracle_candidate(const VarModel& truth) {
  Candidate c;
  c.label = "oracle";
  c.fit = [truth](const TimeSeries&, int, std::uint64_t) {
    return Fitted{truth.coeffs(), truth.sigma()};
  };
  return c;
}

void Scenario::validate() const {
  if (n < 2) throw ConfigError("scenario: n must be at least 2");
  if (replications < 1) throw ConfigError("scenario: replications must be positive");
  if (burn_in < 0) throw ConfigError("scenario: burn_in must be >= 0");
  if (horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
  if (n_freq < 1) throw ConfigError("scenario: n_freq must be positive");
  if (!example1) {
    if (d < 1) throw ConfigError("scenario: d must be positive");
    if (s < 1 || s > d) throw ConfigError("scenario: s must lie in [1, d]");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("scenario: rho must lie in (0,1)");
  }
}

std::string Scenario::label() const {
  if (!name.empty()) return name;
  std::ostringstream os;
  if (example1) {
    os << "example1-" << variant_name(variant);
  } else {
    os << "example2-d" << d << "-s" << s << "-rho" << rho;
  }
  os << "-n" << n;
  return os.str();
}

VarModel scenario_model(const Scenario& sc, std::uint64_t replication_seed) {
  if (sc.example1) return VarModel(example1_coefficients(), example1_sigma(sc.variant));
  const std::uint64_t seed = sc.redraw
                                 ? derive_seed(replication_seed, 0x5eedULL)
                                 : derive_seed(sc.seed, cell_key(sc.d, sc.s, sc.rho));
  return VarModel({random_sparse_var1(sc.d, sc.s, sc.rho, seed)},
                  MatrixXd::Identity(sc.d, sc.d));
}

const BenchmarkRow& BenchmarkResult::find(const std::string& scenario,
                                          const std::string& estimator,
                                          const std::string& criterion) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.estimator == estimator && r.criterion == criterion) return r;
  }
  throw ConfigError("no benchmark row for " + scenario + " / " + estimator + " / " + criterion);
}

Aggregate aggregate(std::vector<double> values) {
  Aggregate a;
  std::vector<double> finite;
  for (double v : values) {
    if (std::isfinite(v)) {
      finite.push_back(v);
    } else {
      ++a.failures;
    }
  }
  a.count = static_cast<int>(finite.size());
  if (finite.empty()) {
    a.mean = a.se = kNaN;
    return a;
  }
  std::sort(finite.begin(), finite.end());
  double sum = 0.0;
  for (double v : finite) sum += v;
  a.mean = sum / a.count;
  if (a.count > 1) {
    double ss = 0.0;
    for (double v : finite) ss += (v - a.mean) * (v - a.mean);
    a.se = std::sqrt(ss / (a.count - 1) / a.count);
  }
  return a;
}

BenchmarkResult run_monte_carlo(const Scenario& sc,
                                const std::vector<Candidate>& candidates,
                                int threads) {
  sc.validate();
  if (threads < 1) throw ConfigError("run_monte_carlo: threads must be positive");
  const int reps = sc.replications;
  const int nc = static_cast<int>(candidates.size());
  const int p = sc.order();
  const VarModel fixed = scenario_model(sc);

  // values[(c * kNumCriteria + k) * reps + r]
  std::vector<double> values(static_cast<std::size_t>(nc) * kNumCriteria * reps, kNaN);
  std::vector<std::vector<ReplicationFailure>> failures(reps);

  const auto replicate = [&](int r) {
    const std::uint64_t seed = derive_seed(sc.seed, static_cast<std::uint64_t>(r));
    const VarModel model = sc.redraw && !sc.example1 ? scenario_model(sc, seed) : fixed;
    const TimeSeries full = simulate(model, sc.n + sc.horizon, sc.burn_in, seed);
    const TimeSeries history(full.values().topRows(sc.n));
    const VectorXd realized = full.values().row(sc.n + sc.horizon - 1).transpose();
    for (int c = 0; c < nc; ++c) {
      double* out = &values[static_cast<std::size_t>(c) * kNumCriteria * reps + r];
      try {
        const Fitted f = candidates[c].fit(history, p, derive_seed(seed, c + 1));
        out[0] = crit_param_error(model, f.coeffs);
        out[reps] = crit_gamma_error(model, f.coeffs, f.sigma, sc.norm);
        out[2 * reps] = crit_spectral_error(model, f.coeffs, f.sigma, sc.norm, sc.n_freq);
        out[3 * reps] =
            scaled_forecast_error(model, f.coeffs, history, realized, sc.horizon).mean();
      } catch (const Error& e) {
        for (int k = 0; k < kNumCriteria; ++k) out[k * reps] = kNaN;
        failures[r].push_back({candidates[c].label, seed, e.what()});
      }
    }
  };

  const int workers = std::min(threads, reps);
  if (workers == 1) {
    for (int r = 0; r < reps; ++r) replicate(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (int r = next++; r < reps; r = next++) replicate(r);
          } catch (...) {
            errors[w] = std::current_exception();
            next = reps;
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BenchmarkResult out;
  const std::string label = sc.label();
  for (int c = 0; c < nc; ++c) {
    for (int k = 0; k < kNumCriteria; ++k) {
      const auto first = values.begin() + (static_cast<std::ptrdiff_t>(c) * kNumCriteria + k) * reps;
      BenchmarkRow row;
      row.scenario = label;
      row.estimator = candidates[c].label;
      row.criterion = kCriteria[k];
      row.agg = aggregate(std::vector<double>(first, first + reps));
      row.replications = reps;
      row.seed = sc.seed;
      out.rows.push_back(std::move(row));
    }
  }
  for (auto& f : failures) {
    for (auto& x : f) out.failures.push_back(std::move(x));
  }
  return out;
}

void write_benchmark_csv(std::ostream& os, const BenchmarkResult& result,
                         const Provenance& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  os << "scenario,estimator,criterion,mean,se,failures,R,seed\n";
  for (const auto& r : result.rows) {
    os << r.scenario << ',' << r.estimator << ',' << r.criterion << ','
       << format_double(r.agg.mean) << ',' << format_double(r.agg.se) << ','
       << r.agg.failures << ',' << r.replications << ',' << r.seed << '\n';
  }
}

}  // namespace sparsevar
