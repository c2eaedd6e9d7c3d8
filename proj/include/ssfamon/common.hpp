#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssfamon {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind { Usage = 1, Data = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(ErrorKind::Usage, msg) {}
};

struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(ErrorKind::Data, msg) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(ErrorKind::Numerical, msg) {}
};

// Columns of X listed in idx, in order.
inline Mat select_columns(const Mat& X, const std::vector<int>& idx) {
  Mat out(X.rows(), static_cast<Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = X.col(idx[k]);
  return out;
}

inline Vec select_entries(const Vec& x, const std::vector<int>& idx) {
  Vec out(static_cast<Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = x(idx[k]);
  return out;
}

// Rows n+1 minus rows n.
inline Mat first_difference(const Mat& X) {
  if (X.rows() < 2) return Mat(0, X.cols());
  return X.bottomRows(X.rows() - 1) - X.topRows(X.rows() - 1);
}

}  // namespace ssfamon
