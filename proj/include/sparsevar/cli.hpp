#pragma once

// Command execution behind the `sparsevar` executable.

#include <iosfwd>

#include "sparsevar/config.hpp"

namespace sparsevar {

/// Runs one command and writes its artifacts under `config.out`:
///   simulate   series.csv, model.model
///   estimate   estimate.model, criteria.csv (with a truth model)
///   benchmark  benchmark.csv, failures.csv
///   verify     verify.csv
/// and `run.ini` with the effective configuration. Progress goes to `log`.
/// Returns 0, or the internal-error status when a verify check fails.
int run(const RunConfig& config, std::ostream& log);

}  // namespace sparsevar
