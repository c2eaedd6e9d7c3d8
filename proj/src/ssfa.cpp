#include "ssfamon/ssfa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssfamon/sfa.hpp"

namespace ssfamon {

void SsfaConfig::validate() const {
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  if (maxIter < 1) throw UsageError("maxIter must be >= 1");
  if (!(tol > 0)) throw UsageError("tol must be > 0");
  if (maxSupport < 0) throw UsageError("maxSupport must be >= 0");
}

TransformedProblem transform_problem(const Mat& X, const Mat& omegaDot) {
  Eigen::SelfAdjointEigenSolver<Mat> es(omegaDot);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of the temporal covariance failed");
  const Vec& L = es.eigenvalues();
  if (!(L.minCoeff() > 0)) throw NumericalError("temporal covariance is not positive definite");
  const Mat& P = es.eigenvectors();
  TransformedProblem t;
  t.A = P * L.cwiseSqrt().asDiagonal();
  t.B = t.A * P.transpose();
  t.Xstar = X * (P * L.cwiseSqrt().cwiseInverse().asDiagonal());
  return t;
}

Mat procrustes_update(const Mat& Xstar, const Mat& X, const Mat& W) {
  Mat M = Xstar.transpose() * (X * W);
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed in Procrustes update");
  return svd.matrixU() * svd.matrixV().transpose();
}

double ssfa_objective(const Mat& Xstar, const Mat& X, const Mat& W, const Mat& V, double lambda,
                      const Mat& omegaDot, const Vec& lambda1) {
  double f = (Xstar - X * W * V.transpose()).squaredNorm();
  for (Index j = 0; j < W.cols(); ++j) {
    f += lambda * W.col(j).dot(omegaDot * W.col(j));
    if (lambda1(j) != 0) f += lambda1(j) * W.col(j).lpNorm<1>();
  }
  return f;
}

namespace {

Mat polar(const Mat& V) {
  Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// Step 2 for one column, with the retry rule for an all-zero loading.
ElasticNetSolution solve_column(const ElasticNetProblem& p, const Lambda1Rule& rule, int maxActive) {
  ElasticNetSolution sol = solve_gen_elastic_net(p, rule, maxActive);
  if (sol.w.cwiseAbs().maxCoeff() > 0) return sol;
  if (rule.kind == Lambda1Rule::Kind::Fixed && std::isinf(rule.value))
    throw NumericalError("degenerate loading: lambda1 = inf shrinks every coefficient to zero");
  const auto& bps = sol.path.breakpoints;
  double above = sol.lambda1Used / sol.scale;
  for (size_t i = 0; i < bps.size(); ++i) {
    if (bps[i].lambda1 < above && bps[i].coefficients.cwiseAbs().maxCoeff() > 0) {
      sol.breakpoint = static_cast<int>(i);
      sol.w = bps[i].coefficients / sol.scale;
      sol.lambda1Used = bps[i].lambda1 * sol.scale;
      return sol;
    }
  }
  throw NumericalError("degenerate loading: no nonzero breakpoint on the elastic-net path");
}

}  // namespace

SsfaModel fit_ssfa(const StandardizedMatrix& data, int k, const SsfaConfig& cfg) {
  cfg.validate();
  const Mat& X = data.X;
  const Index N = X.rows();
  const Index J = X.cols();
  if (N <= J) throw DataError("SSFA needs more samples than variables");
  if (k < 1 || k > J) throw UsageError("number of loadings must be in [1, J]");
  const int maxActive = cfg.maxSupport > 0 ? std::min<int>(cfg.maxSupport, static_cast<int>(J)) : static_cast<int>(J);

  Covariances cov = covariances(data);
  TransformedProblem tp = transform_problem(X, cov.omegaDot);

  GeneralizedSfa init = solve_sfa(covariances(with_difference(tp.Xstar)));
  Mat V = polar(init.W.leftCols(k));

  ElasticNetProblem prob;
  prob.design = X;
  prob.lambda = cfg.lambda;
  prob.omegaDotFactor = tp.B;
  prob.omega = cov.omega;

  SsfaModel m;
  Mat W = Mat::Zero(J, k);
  Vec lam1 = Vec::Zero(k);
  for (int it = 1; it <= cfg.maxIter; ++it) {
    Mat Wn(J, k);
    for (Index j = 0; j < k; ++j) {
      prob.target = tp.Xstar * V.col(j);
      ElasticNetSolution sol = solve_column(prob, cfg.lambda1Rule, maxActive);
      Wn.col(j) = sol.w;
      lam1(j) = sol.lambda1Used;
    }
    V = procrustes_update(tp.Xstar, X, Wn);
    m.objectiveTrace.push_back(ssfa_objective(tp.Xstar, X, Wn, V, cfg.lambda, cov.omegaDot, lam1));
    double change = (Wn - W).cwiseAbs().maxCoeff();
    W = Wn;
    m.iterations = it;
    if (change < cfg.tol) {
      m.converged = true;
      break;
    }
  }

  Vec sl(k);
  for (Index j = 0; j < k; ++j) {
    double var = W.col(j).dot(cov.omega * W.col(j));
    if (!(var > 0)) throw NumericalError("degenerate loading: zero-variance feature");
    W.col(j) /= std::sqrt(var);
    sl(j) = slowness_index(X * W.col(j), data.Xdot * W.col(j));
  }
  std::vector<Index> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sl(a) < sl(b); });

  m.W.resize(J, k);
  m.slowness.resize(k);
  m.lambda1Used.resize(k);
  m.supports.resize(k);
  for (Index t = 0; t < k; ++t) {
    m.W.col(t) = W.col(order[t]);
    m.slowness(t) = sl(order[t]);
    m.lambda1Used(t) = lam1(order[t]);
    for (Index i = 0; i < J; ++i)
      if (m.W(i, t) != 0.0) m.supports[t].push_back(static_cast<int>(i));
  }
  return m;
}

SparseLoading first_sparse_loading(const StandardizedMatrix& X, const SsfaConfig& cfg) {
  SsfaModel m = fit_ssfa(X, 1, cfg);
  return {m.W.col(0), m.supports[0], m.slowness(0)};
}

Vec principal_angles(const Mat& A, const Mat& B) {
  Eigen::HouseholderQR<Mat> qa(A), qb(B);
  Mat Qa = qa.householderQ() * Mat::Identity(A.rows(), A.cols());
  Mat Qb = qb.householderQ() * Mat::Identity(B.rows(), B.cols());
  Eigen::JacobiSVD<Mat> svd(Qa.transpose() * Qb);
  Vec s = svd.singularValues();
  Vec ang(s.size());
  for (Index i = 0; i < s.size(); ++i) ang(i) = std::acos(std::clamp(s(i), -1.0, 1.0));
  std::sort(ang.data(), ang.data() + ang.size());
  return ang;
}

}  // namespace ssfamon
