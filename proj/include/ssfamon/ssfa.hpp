#pragma once

#include <vector>

#include "ssfamon/data.hpp"
#include "ssfamon/larsen.hpp"

namespace ssfamon {

struct SsfaConfig {
  double lambda = 1.5;
  Lambda1Rule lambda1Rule = Lambda1Rule::min_slowness();
  int maxIter = 200;
  double tol = 1e-6;
  int maxSupport = 0;  // 0 means J

  void validate() const;
};

struct SsfaModel {
  Mat W;  // J x k, slowest first, unit-variance features
  Vec slowness;
  std::vector<std::vector<int>> supports;
  Vec lambda1Used;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objectiveTrace;  // after each Step 3
};

// Omegadot = P L P' = A A' with A = P L^{1/2}. Xstar = X A^{-T} = X P L^{-1/2}
// whitens the temporal covariance; B = P L^{1/2} P' is the symmetric factor used by
// the augmented lasso.
struct TransformedProblem {
  Mat Xstar;
  Mat A;
  Mat B;
};
TransformedProblem transform_problem(const Mat& X, const Mat& omegaDot);

// V = Q R' from the SVD Q D R' of Xstar' X W.
Mat procrustes_update(const Mat& Xstar, const Mat& X, const Mat& W);

// ||Xstar - X W V'||^2 + lambda sum_j w_j'Omegadot w_j + sum_j lambda1_j ||w_j||_1
double ssfa_objective(const Mat& Xstar, const Mat& X, const Mat& W, const Mat& V, double lambda,
                      const Mat& omegaDot, const Vec& lambda1);

SsfaModel fit_ssfa(const StandardizedMatrix& X, int k, const SsfaConfig& cfg);

struct SparseLoading {
  Vec w;
  std::vector<int> support;
  double slowness = 0.0;
};
SparseLoading first_sparse_loading(const StandardizedMatrix& X, const SsfaConfig& cfg);

// Principal angles (radians, ascending) between the column spans of A and B.
Vec principal_angles(const Mat& A, const Mat& B);

}  // namespace ssfamon
