#pragma once

// Text formats: series CSV and the `# var-model v1` model document.

#include <iosfwd>
#include <string>
#include <vector>

#include "sparsevar/var_model.hpp"

namespace sparsevar {

/// Lines written before the payload, each prefixed with "# ".
using Provenance = std::vector<std::string>;

/// %.17g formatting; round-trips every finite double.
std::string format_double(double v);

void write_series_csv(std::ostream& os, const TimeSeries& series,
                      const Provenance& header = {});
TimeSeries read_series_csv(std::istream& is);

void write_matrix_block(std::ostream& os, const std::string& label,
                        const MatrixXd& m);

void write_model(std::ostream& os, const VarModel& model,
                 const Provenance& header = {});
VarModel read_model(std::istream& is);

void save_series(const std::string& path, const TimeSeries& series,
                 const Provenance& header = {});
TimeSeries load_series(const std::string& path);
void save_model(const std::string& path, const VarModel& model,
                const Provenance& header = {});
VarModel load_model(const std::string& path);

}  // namespace sparsevar
