#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ssfamon/common.hpp"

namespace ssfamon {

struct RawDataset {
  std::vector<std::string> names;
  Mat values;  // N x J, one sample per row
};

struct Standardizer {
  Vec mean;
  Vec std;
};

struct StandardizedMatrix {
  Mat X;     // N x J
  Mat Xdot;  // (N-1) x J
};

struct Covariances {
  Mat omega;
  Mat omegaDot;
  double ridge = 0.0;  // added to the diagonal of omegaDot
};

RawDataset parse_csv(std::istream& in, const std::string& origin = "<stream>");
RawDataset load_csv(const std::string& path);
void write_csv(std::ostream& out, const RawDataset& data);
void write_csv(const std::string& path, const RawDataset& data);

Standardizer fit_standardizer(const RawDataset& data);
StandardizedMatrix standardize(const RawDataset& data, const Standardizer& s);
StandardizedMatrix standardize(const Mat& values, const Standardizer& s);

// Wraps an already standardized matrix and computes its first difference.
StandardizedMatrix with_difference(Mat X);

// Omega = centered covariance of X over N-1. OmegaDot = Xdot'Xdot/(N-1) plus a
// ridge of 1e-8 * trace/J, so that w'OmegaDot w / w'Omega w is the slowness
// index of X w.
Covariances covariances(const StandardizedMatrix& X);

}  // namespace ssfamon
