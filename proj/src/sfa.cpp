#include "ssfamon/sfa.hpp"

#include <cmath>

namespace ssfamon {

GeneralizedSfa solve_sfa(const Covariances& cov) {
  const Index J = cov.omega.rows();
  Mat omega = cov.omega;
  double floor = 1e-10 * (omega.trace() > 0 ? omega.trace() / static_cast<double>(J) : 1.0);
  if (J > 0 && Eigen::SelfAdjointEigenSolver<Mat>(omega, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() < floor)
    omega.diagonal().array() += floor;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(cov.omegaDot, omega);
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigenproblem failed (covariance ill-conditioned)");
  GeneralizedSfa out;
  out.W = es.eigenvectors();
  out.eigenvalues = es.eigenvalues();
  if (!out.W.allFinite() || !out.eigenvalues.allFinite()) throw NumericalError("generalized eigenproblem failed");
  for (Index j = 0; j < J; ++j) {
    Index imax;
    out.W.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.W(imax, j) < 0) out.W.col(j) *= -1.0;
  }
  return out;
}

double slowness_index(const Vec& s, const Vec& sdot) {
  double den = s.squaredNorm();
  if (!(den > 1e-300)) throw DataError("slowness index of a zero-variance series");
  return sdot.squaredNorm() / den;
}

int leading_count(const Vec& slowness, double threshold) {
  int M = 0;
  while (M < slowness.size() && slowness(M) <= threshold * (1.0 + 1e-12)) ++M;
  return M;
}

int select_system_count(const Mat& S, const Mat& Sdot, const Mat& X, const Mat& Xdot) {
  double thr = 0.0;
  for (Index j = 0; j < X.cols(); ++j) thr = std::max(thr, slowness_index(X.col(j), Xdot.col(j)));
  Vec sl(S.cols());
  for (Index j = 0; j < S.cols(); ++j) sl(j) = slowness_index(S.col(j), Sdot.col(j));
  return leading_count(sl, thr);
}

Mat temporal_covariance(const Mat& Sdot, Index N) {
  Mat C = Sdot.transpose() * Sdot / static_cast<double>(N - 1);
  C = 0.5 * (C + C.transpose());
  if (C.rows() > 0) {
    double tr = C.trace();
    C.diagonal().array() += 1e-12 * (tr > 0 ? tr / static_cast<double>(C.rows()) : 1.0);
  }
  return C;
}

SfaModel fit_sfa(const StandardizedMatrix& data) {
  const Index N = data.X.rows();
  const Index J = data.X.cols();
  if (N <= J) throw DataError("SFA needs more samples than variables (N=" + std::to_string(N) + ", J=" +
                              std::to_string(J) + ")");
  Covariances cov = covariances(data);
  GeneralizedSfa g = solve_sfa(cov);
  SfaModel m;
  m.W = g.W;
  m.eigenvalues = g.eigenvalues;
  Mat S = data.X * m.W;
  Mat Sdot = data.Xdot * m.W;
  m.slowness.resize(J);
  for (Index j = 0; j < J; ++j) m.slowness(j) = slowness_index(S.col(j), Sdot.col(j));
  m.M = select_system_count(S, Sdot, data.X, data.Xdot);
  m.omegaDotS = temporal_covariance(Sdot.leftCols(m.M), N);
  m.omegaDotF = temporal_covariance(Sdot.rightCols(J - m.M), N);
  return m;
}

std::pair<FeaturePair, FeaturePair> project(const SfaModel& model, const Vec& x, const std::optional<Vec>& xPrev) {
  const Index J = model.W.rows();
  if (x.size() != J || (xPrev && xPrev->size() != J))
    throw DataError("sample has " + std::to_string(x.size()) + " variables, model expects " + std::to_string(J));
  Vec s = model.W.transpose() * x;
  FeaturePair sys, res;
  sys.s = s.head(model.M);
  res.s = s.tail(J - model.M);
  if (xPrev) {
    Vec sd = model.W.transpose() * (x - *xPrev);
    sys.sdot = sd.head(model.M);
    res.sdot = sd.tail(J - model.M);
  }
  return {sys, res};
}

namespace {
double mahalanobis(const Vec& v, const Mat& C) {
  if (v.size() == 0) return 0.0;
  return v.dot(C.ldlt().solve(v));
}
}  // namespace

Statistics statistics(const FeaturePair& system, const FeaturePair& residual, const Mat& omegaDotS,
                      const Mat& omegaDotF) {
  Statistics st;
  st.T2s = system.s.squaredNorm();
  st.T2f = residual.s.squaredNorm();
  if (system.sdot) st.D2s = std::max(0.0, mahalanobis(*system.sdot, omegaDotS));
  if (residual.sdot) st.D2f = std::max(0.0, mahalanobis(*residual.sdot, omegaDotF));
  return st;
}

Statistics statistics(const SfaModel& model, const FeaturePair& system, const FeaturePair& residual) {
  return statistics(system, residual, model.omegaDotS, model.omegaDotF);
}

}  // namespace ssfamon
