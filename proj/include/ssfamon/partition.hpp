#pragma once

#include <vector>

#include "ssfamon/ssfa.hpp"

namespace ssfamon {

struct RankTestResult {
  double p = 1.0;
  bool sameSlowness = true;
  int n = 0;             // nonzero differences
  double statistic = 0;  // sum of ranks of positive differences
  bool exact = true;
};

struct TestRecord {
  std::vector<int> candidate;
  double p = 1.0;  // NaN for the first, unconditionally accepted subset
  bool accepted = true;
};

struct SubsetPartition {
  std::vector<std::vector<int>> sdl;
  std::vector<int> sdnl;
  std::vector<TestRecord> testTrace;
};

// SL_n = sdot_n' Xidot^{-1} sdot_n / s_{n+1}' Xi^{-1} s_{n+1}, n = 0..N-2.
Vec slowness_vector(const Mat& S, const Mat& Sdot);

// Two-sided Wilcoxon signed-rank test on a - b. Exact null distribution for
// n <= 25 nonzero differences, normal approximation with tie and continuity
// correction otherwise.
RankTestResult signed_rank_test(const Vec& a, const Vec& b, double alpha);

SubsetPartition partition_variables(const StandardizedMatrix& X, const SsfaConfig& cfg, double alpha);

// Disjoint, exhaustive over 0..J-1, sdl sets nonempty.
bool partition_is_valid(const SubsetPartition& p, int J);

}  // namespace ssfamon
