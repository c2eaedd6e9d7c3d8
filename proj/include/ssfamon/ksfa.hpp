#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ssfamon/partition.hpp"
#include "ssfamon/sfa.hpp"

namespace ssfamon {

struct KsfaConfig {
  // Explicit RBF gamma; when absent, gamma = gammaScale / (2 median^2) over
  // pairwise training distances.
  std::optional<double> gamma;
  double gammaScale = 0.005;
  double ridge = 1e-6;
  // Kernel principal directions with eigenvalue below rankTol * largest are dropped.
  double rankTol = 1e-3;
};

struct KsfaModel {
  Mat trainSupers;  // N x d
  double gamma = 0.0;
  Vec colMean;      // column means of the uncentered training kernel
  double totalMean = 0.0;
  Mat alphas;       // N x r, columns slowest first
  int M = 0;
  int totalFeatures = 0;
  Vec slowness;
  double threshold = 0.0;
  Mat omegaDotS;
  Mat omegaDotF;
  double ridge = 1e-6;
};

struct CenteredKernel {
  Mat Ktilde;     // N x N
  Mat KdotTilde;  // (N-1) x (N-1), D Ktilde D'
};

Mat build_super_samples(const SubsetPartition& partition, const std::vector<SfaModel>& models, const Mat& X);
Vec build_super_sample(const SubsetPartition& partition, const std::vector<SfaModel>& models, const Vec& x);

double median_heuristic_gamma(const Mat& supers);
Mat rbf_kernel(const Mat& A, const Mat& B, double gamma);
CenteredKernel centered_kernel(const Mat& supers, double gamma);

KsfaModel fit_ksfa(const Mat& supers, const KsfaConfig& cfg);

// Unit-variance kernel slow features of one super sample.
Vec ksfa_features(const KsfaModel& model, const Vec& xsp);
std::pair<FeaturePair, FeaturePair> project_super(const KsfaModel& model, const Vec& xsp,
                                                  const std::optional<Vec>& xspPrev);
std::pair<FeaturePair, FeaturePair> split_super_features(const KsfaModel& model, const Vec& s,
                                                         const std::optional<Vec>& sPrev);
Statistics statistics_super(const KsfaModel& model, const FeaturePair& system, const FeaturePair& residual);

}  // namespace ssfamon
