#pragma once

#include <optional>

#include "ssfamon/data.hpp"

namespace ssfamon {

struct SfaModel {
  Mat W;          // J x J, columns slowest first
  Vec slowness;   // per-feature sdot's / s's on the training data
  Vec eigenvalues;
  int M = 0;      // system feature count
  Mat omegaDotS;  // M x M
  Mat omegaDotF;  // (J-M) x (J-M)
};

struct FeaturePair {
  Vec s;
  std::optional<Vec> sdot;
};

struct Statistics {
  double T2s = 0.0;
  double T2f = 0.0;
  std::optional<double> D2s;
  std::optional<double> D2f;
};

// Loadings of Omegadot w = lambda Omega w, w'Omega w = 1, ascending. Each loading is
// signed so that its largest-magnitude entry is positive.
struct GeneralizedSfa {
  Mat W;
  Vec eigenvalues;
};
GeneralizedSfa solve_sfa(const Covariances& cov);

SfaModel fit_sfa(const StandardizedMatrix& X);

double slowness_index(const Vec& s, const Vec& sdot);

// Length of the leading run of entries not exceeding threshold (ties within 1e-12 relative).
int leading_count(const Vec& slowness, double threshold);

// Number of leading features whose slowness does not exceed the largest
// per-variable slowness of X.
int select_system_count(const Mat& S, const Mat& Sdot, const Mat& X, const Mat& Xdot);

// Uncentered second moment of temporal features over N-1, as used for D^2.
Mat temporal_covariance(const Mat& Sdot, Index N);

std::pair<FeaturePair, FeaturePair> project(const SfaModel& model, const Vec& x, const std::optional<Vec>& xPrev);

Statistics statistics(const FeaturePair& system, const FeaturePair& residual, const Mat& omegaDotS,
                      const Mat& omegaDotF);
Statistics statistics(const SfaModel& model, const FeaturePair& system, const FeaturePair& residual);

}  // namespace ssfamon
