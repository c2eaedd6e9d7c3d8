#include "ssfamon/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ssfamon {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& cell, double& out) {
  std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

}  // namespace

RawDataset parse_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  RawDataset ds;
  for (auto& c : split_line(line)) ds.names.push_back(trim(c));
  const size_t J = ds.names.size();

  std::vector<double> buf;
  size_t rows = 0;
  size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != J) {
      throw DataError(origin + ": row " + std::to_string(lineNo) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(J));
    }
    for (size_t j = 0; j < J; ++j) {
      double v;
      if (!parse_double(cells[j], v)) {
        throw DataError(origin + ": row " + std::to_string(lineNo) + ", column " + std::to_string(j + 1) + " (" +
                        ds.names[j] + "): cannot parse '" + trim(cells[j]) + "' as a finite number");
      }
      buf.push_back(v);
    }
    ++rows;
  }
  if (rows < 3) throw DataError(origin + ": need at least 3 data rows, got " + std::to_string(rows));
  ds.values.resize(static_cast<Index>(rows), static_cast<Index>(J));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < J; ++j) ds.values(static_cast<Index>(i), static_cast<Index>(j)) = buf[i * J + j];
  return ds;
}

RawDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_csv(in, path);
}

void write_csv(std::ostream& out, const RawDataset& data) {
  for (size_t j = 0; j < data.names.size(); ++j) out << (j ? "," : "") << data.names[j];
  out << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < data.values.rows(); ++i) {
    for (Index j = 0; j < data.values.cols(); ++j) out << (j ? "," : "") << data.values(i, j);
    out << '\n';
  }
}

void write_csv(const std::string& path, const RawDataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_csv(out, data);
}

Standardizer fit_standardizer(const RawDataset& data) {
  const Mat& V = data.values;
  const Index N = V.rows();
  if (N < 3) throw DataError("need at least 3 samples, got " + std::to_string(N));
  Standardizer s;
  s.mean = V.colwise().mean().transpose();
  s.std.resize(V.cols());
  for (Index j = 0; j < V.cols(); ++j) {
    double var = (V.col(j).array() - s.mean(j)).square().sum() / static_cast<double>(N - 1);
    if (!(var > 1e-12)) {
      std::string name = j < static_cast<Index>(data.names.size()) ? data.names[j] : std::to_string(j);
      throw DataError("variable '" + name + "' is near-constant (variance " + std::to_string(var) + ")");
    }
    s.std(j) = std::sqrt(var);
  }
  return s;
}

StandardizedMatrix standardize(const Mat& values, const Standardizer& s) {
  if (values.cols() != s.mean.size()) {
    throw DataError("dimension mismatch: data has " + std::to_string(values.cols()) + " variables, standardizer " +
                    std::to_string(s.mean.size()));
  }
  Mat X = (values.rowwise() - s.mean.transpose()).array().rowwise() / s.std.transpose().array();
  return with_difference(std::move(X));
}

StandardizedMatrix standardize(const RawDataset& data, const Standardizer& s) { return standardize(data.values, s); }

StandardizedMatrix with_difference(Mat X) {
  StandardizedMatrix out;
  out.Xdot = first_difference(X);
  out.X = std::move(X);
  return out;
}

Covariances covariances(const StandardizedMatrix& data) {
  const Index N = data.X.rows();
  const Index J = data.X.cols();
  if (N < 3) throw DataError("covariances need at least 3 samples");
  Covariances c;
  Mat Xc = data.X.rowwise() - data.X.colwise().mean();
  c.omega = Xc.transpose() * Xc / static_cast<double>(N - 1);
  c.omegaDot = data.Xdot.transpose() * data.Xdot / static_cast<double>(N - 1);
  c.omega = 0.5 * (c.omega + c.omega.transpose());
  c.omegaDot = 0.5 * (c.omegaDot + c.omegaDot.transpose());
  double tr = c.omegaDot.trace();
  c.ridge = 1e-8 * (tr > 0 ? tr / static_cast<double>(J) : 1.0);
  c.omegaDot.diagonal().array() += c.ridge;
  return c;
}

}  // namespace ssfamon
