#include "ssfamon/ksfa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ssfamon {

Mat build_super_samples(const SubsetPartition& partition, const std::vector<SfaModel>& models, const Mat& X) {
  if (models.size() != partition.sdl.size()) throw DataError("subset model count does not match partition");
  Index width = static_cast<Index>(partition.sdnl.size());
  for (const auto& m : models) width += m.M;
  Mat out(X.rows(), width);
  Index col = 0;
  for (size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    if (m.W.rows() != static_cast<Index>(partition.sdl[k].size())) throw DataError("subset model dimension mismatch");
    out.middleCols(col, m.M) = select_columns(X, partition.sdl[k]) * m.W.leftCols(m.M);
    col += m.M;
  }
  for (int v : partition.sdnl) out.col(col++) = X.col(v);
  return out;
}

Vec build_super_sample(const SubsetPartition& partition, const std::vector<SfaModel>& models, const Vec& x) {
  Mat row = x.transpose();
  return build_super_samples(partition, models, row).row(0).transpose();
}

double median_heuristic_gamma(const Mat& Z) {
  const Index N = Z.rows();
  std::vector<double> d;
  d.reserve(static_cast<size_t>(N * (N - 1) / 2));
  for (Index i = 0; i < N; ++i)
    for (Index j = i + 1; j < N; ++j) d.push_back((Z.row(i) - Z.row(j)).norm());
  if (d.empty()) throw DataError("median heuristic needs at least 2 samples");
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  if (!(med > 0)) throw NumericalError("degenerate bandwidth: median pairwise distance is zero");
  return 1.0 / (2.0 * med * med);
}

Mat rbf_kernel(const Mat& A, const Mat& B, double gamma) {
  Vec na = A.rowwise().squaredNorm();
  Vec nb = B.rowwise().squaredNorm();
  Mat D = (-2.0 * A * B.transpose()).colwise() + na;
  D.rowwise() += nb.transpose();
  return (-gamma * D.cwiseMax(0.0)).array().exp().matrix();
}

namespace {

Mat center(const Mat& K, const Vec& colMean, double total) {
  Mat Kt = K;
  Kt.rowwise() -= colMean.transpose();
  Kt.colwise() -= colMean;
  Kt.array() += total;
  return 0.5 * (Kt + Kt.transpose());
}

}  // namespace

CenteredKernel centered_kernel(const Mat& Z, double gamma) {
  if (!(gamma > 0)) throw UsageError("kernel gamma must be > 0");
  Mat K = rbf_kernel(Z, Z, gamma);
  Vec colMean = K.colwise().mean().transpose();
  CenteredKernel ck;
  ck.Ktilde = center(K, colMean, K.mean());
  Mat DK = first_difference(ck.Ktilde);
  ck.KdotTilde = first_difference(DK.transpose());
  return ck;
}

KsfaModel fit_ksfa(const Mat& Z, const KsfaConfig& cfg) {
  const Index N = Z.rows();
  if (N < 10) throw DataError("KSFA needs at least 10 samples");
  if (!(cfg.ridge > 0)) throw UsageError("KSFA ridge must be > 0");
  KsfaModel m;
  m.ridge = cfg.ridge;
  m.trainSupers = Z;
  m.gamma = cfg.gamma ? *cfg.gamma : cfg.gammaScale * median_heuristic_gamma(Z);
  if (!(m.gamma > 0) || !std::isfinite(m.gamma)) throw UsageError("kernel gamma must be a positive finite number");

  Mat K = rbf_kernel(Z, Z, m.gamma);
  m.colMean = K.colwise().mean().transpose();
  m.totalMean = K.mean();
  Mat Kt = center(K, m.colMean, m.totalMean);
  K.resize(0, 0);

  Eigen::SelfAdjointEigenSolver<Mat> es(Kt);
  if (es.info() != Eigen::Success) throw NumericalError("kernel eigendecomposition failed");
  const Vec& ev = es.eigenvalues();
  const double top = ev(N - 1);
  if (!(top > 0)) throw NumericalError("degenerate bandwidth: centered kernel is zero");
  Index r = 0;
  while (r < N - 1 && ev(N - 1 - r) >= cfg.rankTol * top) ++r;
  Mat U = es.eigenvectors().rightCols(r).rowwise().reverse();
  Vec lam = ev.tail(r).reverse();

  // Restricted to span(U): features S = U diag(lam) c, alpha = U c.
  Mat G = first_difference(U) * lam.asDiagonal();
  Mat A = G.transpose() * G;
  A = 0.5 * (A + A.transpose());
  Vec bdiag = lam.array().square() + cfg.ridge * static_cast<double>(N);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> gs(A, Mat(bdiag.asDiagonal()));
  if (gs.info() != Eigen::Success) throw NumericalError("kernel SFA eigenproblem failed");
  Mat C = gs.eigenvectors();
  Mat S = U * (lam.asDiagonal() * C);
  Mat alpha = U * C;
  for (Index j = 0; j < r; ++j) {
    double sd = std::sqrt(S.col(j).squaredNorm() / static_cast<double>(N - 1));
    if (!(sd > 0)) throw NumericalError("kernel feature with zero training variance");
    Index imax;
    S.col(j).cwiseAbs().maxCoeff(&imax);
    double sgn = S(imax, j) < 0 ? -1.0 : 1.0;
    S.col(j) *= sgn / sd;
    alpha.col(j) *= sgn / sd;
  }
  Mat Sd = first_difference(S);
  Vec sl(r);
  for (Index j = 0; j < r; ++j) sl(j) = Sd.col(j).squaredNorm() / S.col(j).squaredNorm();
  std::vector<Index> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return sl(a) < sl(b); });
  m.alphas.resize(N, r);
  m.slowness.resize(r);
  Mat Sdo(N - 1, r);
  for (Index t = 0; t < r; ++t) {
    m.alphas.col(t) = alpha.col(order[t]);
    m.slowness(t) = sl(order[t]);
    Sdo.col(t) = Sd.col(order[t]);
  }
  m.totalFeatures = static_cast<int>(r);

  double thr = 0.0;
  for (Index j = 0; j + 1 < N; ++j) {
    double den = Kt(j + 1, j + 1);
    if (!(den > 0)) continue;
    double kd = Kt(j + 1, j + 1) - 2.0 * Kt(j, j + 1) + Kt(j, j);
    thr = std::max(thr, kd / den);
  }
  m.threshold = thr;
  const int M = leading_count(m.slowness, thr);
  if (M == 0) throw NumericalError("degenerate split: no kernel slow feature passes the selection threshold");
  m.M = M;
  m.omegaDotS = temporal_covariance(Sdo.leftCols(M), N);
  m.omegaDotF = temporal_covariance(Sdo.rightCols(r - M), N);
  return m;
}

Vec ksfa_features(const KsfaModel& m, const Vec& xsp) {
  if (xsp.size() != m.trainSupers.cols())
    throw DataError("super sample has length " + std::to_string(xsp.size()) + ", model expects " +
                    std::to_string(m.trainSupers.cols()));
  Vec k = (-m.gamma * (m.trainSupers.rowwise() - xsp.transpose()).rowwise().squaredNorm()).array().exp().matrix();
  Vec kt = k.array() - k.mean() - m.colMean.array() + m.totalMean;
  return m.alphas.transpose() * kt;
}

std::pair<FeaturePair, FeaturePair> split_super_features(const KsfaModel& m, const Vec& s,
                                                         const std::optional<Vec>& sPrev) {
  const Index r = m.totalFeatures;
  FeaturePair sys, res;
  sys.s = s.head(m.M);
  res.s = s.tail(r - m.M);
  if (sPrev) {
    Vec sd = s - *sPrev;
    sys.sdot = sd.head(m.M);
    res.sdot = sd.tail(r - m.M);
  }
  return {sys, res};
}

std::pair<FeaturePair, FeaturePair> project_super(const KsfaModel& m, const Vec& xsp,
                                                  const std::optional<Vec>& xspPrev) {
  Vec s = ksfa_features(m, xsp);
  std::optional<Vec> sp;
  if (xspPrev) sp = ksfa_features(m, *xspPrev);
  return split_super_features(m, s, sp);
}

Statistics statistics_super(const KsfaModel& m, const FeaturePair& system, const FeaturePair& residual) {
  return statistics(system, residual, m.omegaDotS, m.omegaDotF);
}

}  // namespace ssfamon
