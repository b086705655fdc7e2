#include "sparsevar/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sparsevar/errors.hpp"

namespace sparsevar {

namespace {

void write_header(std::ostream& os, const Provenance& header) {
  for (const auto& line : header) os << "# " << line << '\n';
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, int line_no) {
  const std::string t = trim(tok);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse '" +
                    t + "' as a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// Reads the next line that is neither blank nor a comment.
bool next_payload_line(std::istream& is, std::string& line, int& line_no) {
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    return true;
  }
  return false;
}

MatrixXd read_block(std::istream& is, int rows, int cols, int& line_no) {
  MatrixXd m(rows, cols);
  std::string line;
  for (int i = 0; i < rows; ++i) {
    if (!next_payload_line(is, line, line_no)) {
      throw DataError("model file: truncated matrix block at line " +
                      std::to_string(line_no));
    }
    std::istringstream ls(line);
    std::string tok;
    int j = 0;
    while (ls >> tok) {
      if (j >= cols) {
        throw DimensionError("model file line " + std::to_string(line_no) +
                             ": too many entries");
      }
      m(i, j++) = parse_double(tok, line_no);
    }
    if (j != cols) {
      throw DimensionError("model file line " + std::to_string(line_no) +
                           ": expected " + std::to_string(cols) + " entries");
    }
  }
  return m;
}

int read_int_field(std::istream& is, const std::string& key, int& line_no) {
  std::string line;
  if (!next_payload_line(is, line, line_no) ||
      line.rfind(key + "=", 0) != 0) {
    throw DataError("model file line " + std::to_string(line_no) +
                    ": expected '" + key + "='");
  }
  const double v = parse_double(line.substr(key.size() + 1), line_no);
  if (v < 1 || v != std::floor(v)) {
    throw DataError("model file: " + key + " must be a positive integer");
  }
  return static_cast<int>(v);
}

void expect_label(std::istream& is, const std::string& label, int& line_no) {
  std::string line;
  if (!next_payload_line(is, line, line_no) || line != label) {
    throw DataError("model file line " + std::to_string(line_no) +
                    ": expected '" + label + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(std::ostream& os, const TimeSeries& series,
                      const Provenance& header) {
  write_header(os, header);
  os << 't';
  for (int j = 1; j <= series.d(); ++j) os << ",x" << j;
  os << '\n';
  for (int t = 0; t < series.n(); ++t) {
    os << (t + 1);
    for (int j = 0; j < series.d(); ++j) {
      os << ',' << format_double(series.values()(t, j));
    }
    os << '\n';
  }
}

TimeSeries read_series_csv(std::istream& is) {
  std::string line;
  int line_no = 0;
  if (!next_payload_line(is, line, line_no)) {
    throw DataError("series csv: missing header");
  }
  const auto head = split(line, ',');
  if (head.empty() || trim(head[0]) != "t" || head.size() < 2) {
    throw DataError("series csv: header must be t,x1,...,xd");
  }
  const int d = static_cast<int>(head.size()) - 1;
  std::vector<double> vals;
  int n = 0;
  while (next_payload_line(is, line, line_no)) {
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != d + 1) {
      throw DimensionError("series csv line " + std::to_string(line_no) +
                           ": expected " + std::to_string(d + 1) + " fields");
    }
    for (int j = 1; j <= d; ++j) vals.push_back(parse_double(cells[j], line_no));
    ++n;
  }
  if (n == 0) throw DataError("series csv: no observations");
  MatrixXd m(n, d);
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < d; ++j) m(t, j) = vals[static_cast<std::size_t>(t) * d + j];
  return TimeSeries(std::move(m));
}

void write_matrix_block(std::ostream& os, const std::string& label,
                        const MatrixXd& m) {
  os << label << ":\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_model(std::ostream& os, const VarModel& model,
                 const Provenance& header) {
  os << "# var-model v1\n";
  write_header(os, header);
  os << "p=" << model.p() << "\nd=" << model.d() << '\n';
  for (int k = 1; k <= model.p(); ++k) {
    write_matrix_block(os, "A" + std::to_string(k), model.coeff(k));
  }
  write_matrix_block(os, "Sigma", model.sigma());
}

VarModel read_model(std::istream& is) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line) != "# var-model v1") {
    throw DataError("model file: missing '# var-model v1' header");
  }
  const int p = read_int_field(is, "p", line_no);
  const int d = read_int_field(is, "d", line_no);
  std::vector<MatrixXd> coeffs;
  for (int k = 1; k <= p; ++k) {
    expect_label(is, "A" + std::to_string(k) + ":", line_no);
    coeffs.push_back(read_block(is, d, d, line_no));
  }
  expect_label(is, "Sigma:", line_no);
  MatrixXd sigma = read_block(is, d, d, line_no);
  return VarModel(std::move(coeffs), std::move(sigma));
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for reading");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

void save_series(const std::string& path, const TimeSeries& series,
                 const Provenance& header) {
  auto f = open_out(path);
  write_series_csv(f, series, header);
}

TimeSeries load_series(const std::string& path) {
  auto f = open_in(path);
  return read_series_csv(f);
}

void save_model(const std::string& path, const VarModel& model,
                const Provenance& header) {
  auto f = open_out(path);
  write_model(f, model, header);
}

VarModel load_model(const std::string& path) {
  auto f = open_in(path);
  return read_model(f);
}

}  // namespace sparsevar
