#include "sparsevar/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "sparsevar/errors.hpp"
#include "sparsevar/metrics.hpp"

namespace sparsevar {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  const fs::path path = fs::path(cfg.out) / name;
  std::ofstream os(path);
  if (!os) throw DataError("cannot write '" + path.string() + "'");
  return os;
}

void write_header(std::ostream& os, const Provenance& header) {
  for (const auto& line : header) os << "# " << line << '\n';
}

void write_effective_config(const RunConfig& cfg) {
  std::ofstream os = open_out(cfg, "run.ini");
  write_header(os, cfg.provenance());
  for (const auto& line : cfg.canonical()) os << line << '\n';
}

VarModel true_model(const RunConfig& cfg) {
  const ModelSpec& m = cfg.model;
  if (m.source == "file") return load_model(m.file);
  Scenario sc;
  sc.seed = *cfg.seed;
  if (m.source == "example1") {
    sc.variant = m.variant;
  } else {
    sc.example1 = false;
    sc.d = m.d;
    sc.s = m.s;
    sc.rho = m.rho;
  }
  return scenario_model(sc);
}

int run_simulate(const RunConfig& cfg, std::ostream& log) {
  const VarModel model = true_model(cfg);
  const TimeSeries series = simulate(model, cfg.model.n, cfg.model.burn_in, *cfg.seed);
  const Provenance prov = cfg.provenance();
  {
    std::ofstream os = open_out(cfg, "series.csv");
    write_series_csv(os, series, prov);
  }
  {
    std::ofstream os = open_out(cfg, "model.model");
    write_model(os, model, prov);
  }
  log << "simulate: " << series.n() << " observations of dimension " << series.d() << '\n';
  return 0;
}

int run_estimate(const RunConfig& cfg, std::ostream& log) {
  const TimeSeries series = load_series(cfg.estimate.series);
  const int p = cfg.estimate.p;
  const EstimatorConfig ec = cfg.estimators.build().front();
  const Fitted f = make_candidate(ec).fit(series, p, *cfg.seed);
  const VarModel est(f.coeffs, f.sigma);
  Provenance prov = cfg.provenance();
  prov.push_back("estimator: " + ec.display());
  {
    std::ofstream os = open_out(cfg, "estimate.model");
    write_model(os, est, prov);
  }
  log << "estimate: " << ec.display() << ", p = " << p << '\n';
  if (cfg.estimate.truth.empty()) return 0;

  const VarModel truth = load_model(cfg.estimate.truth);
  if (truth.d() != est.d()) {
    throw DimensionError("truth has d = " + std::to_string(truth.d()) + ", series has d = " +
                         std::to_string(est.d()));
  }
  const NormKind norm = NormKind::kInf;
  std::ofstream os = open_out(cfg, "criteria.csv");
  write_header(os, prov);
  os << "criterion,value\n";
  os << "param," << format_double(crit_param_error(truth, f.coeffs)) << '\n';
  os << "gamma," << format_double(crit_gamma_error(truth, f.coeffs, f.sigma, norm)) << '\n';
  os << "spectral," << format_double(crit_spectral_error(truth, f.coeffs, f.sigma, norm)) << '\n';
  return 0;
}

int run_benchmark(const RunConfig& cfg, std::ostream& log) {
  std::vector<Candidate> candidates;
  for (const auto& ec : cfg.estimators.build()) candidates.push_back(make_candidate(ec));
  const auto scenarios = cfg.benchmark.scenarios(*cfg.seed);

  BenchmarkResult all;
  std::vector<std::string> failure_scenario;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    log << "benchmark: " << sc.label() << " (" << i + 1 << "/" << scenarios.size() << ")\n";
    BenchmarkResult r = run_monte_carlo(sc, candidates, cfg.threads);
    all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    for (auto& f : r.failures) {
      failure_scenario.push_back(sc.label());
      all.failures.push_back(std::move(f));
    }
  }
  const Provenance prov = cfg.provenance();
  {
    std::ofstream os = open_out(cfg, "benchmark.csv");
    write_benchmark_csv(os, all, prov);
  }
  std::ofstream os = open_out(cfg, "failures.csv");
  write_header(os, prov);
  os << "scenario,estimator,seed,message\n";
  for (std::size_t i = 0; i < all.failures.size(); ++i) {
    const auto& f = all.failures[i];
    std::string msg = f.message;
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    os << failure_scenario[i] << ',' << f.estimator << ',' << f.seed << ',' << msg << '\n';
  }
  log << "benchmark: " << all.rows.size() << " rows, " << all.failures.size()
      << " failed fits\n";
  return 0;
}

int run_verify_command(const RunConfig& cfg, std::ostream& log) {
  const auto results = run_verify(cfg.verify);
  std::ofstream os = open_out(cfg, "verify.csv");
  write_header(os, cfg.provenance());
  write_verify_report(os, results);
  bool ok = true;
  for (const auto& r : results) {
    log << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, "
        << r.failures << " failures";
    if (!r.detail.empty()) log << " (" << r.detail << ")";
    log << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : static_cast<int>(ErrorClass::kInternal);
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw DataError("cannot create output directory '" + config.out + "': " + ec.message());
  write_effective_config(config);
  switch (config.command) {
    case Command::kSimulate: return run_simulate(config, log);
    case Command::kEstimate: return run_estimate(config, log);
    case Command::kBenchmark: return run_benchmark(config, log);
    case Command::kVerify: return run_verify_command(config, log);
  }
  throw InternalError("run: unknown command");
}

}  // namespace sparsevar
