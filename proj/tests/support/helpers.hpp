#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ssfamon/data.hpp"
#include "ssfamon/larsen.hpp"

namespace testsupport {

using ssfamon::Index;
using ssfamon::Mat;
using ssfamon::Vec;

inline Mat gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline ssfamon::StandardizedMatrix standardize_columns(const Mat& values) {
  ssfamon::RawDataset ds;
  ds.values = values;
  for (Index j = 0; j < values.cols(); ++j) ds.names.push_back("x" + std::to_string(j + 1));
  return ssfamon::standardize(ds, ssfamon::fit_standardizer(ds));
}

// AR(1) sources with mixed memories under a well-conditioned mixing, so SFA has distinct slownesses.
inline ssfamon::StandardizedMatrix random_dynamic(std::uint64_t seed, Index N, Index J) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-0.3, 0.95);
  Mat latent(N, J);
  for (Index j = 0; j < J; ++j) {
    double phi = u(rng), v = 0;
    for (Index n = 0; n < N; ++n) {
      v = phi * v + g(rng);
      latent(n, j) = v;
    }
  }
  Mat Q = Eigen::HouseholderQR<Mat>(gaussian(rng, J, J)).householderQ();
  std::uniform_real_distribution<double> sc(0.5, 1.5);
  for (Index j = 0; j < J; ++j) Q.col(j) *= sc(rng);
  return standardize_columns(latent * Q);
}

// Blocks of variables driven by one sinusoid each (distinct periods), loading
// 0.7 + 0.6 U(0,1) plus Gaussian noise, followed by independent noise variables.
inline ssfamon::StandardizedMatrix planted_blocks(std::uint64_t seed, Index N = 1000,
                                                   const std::vector<int>& sizes = {3, 3}, int noiseVars = 4,
                                                   double noiseSd = 0.3,
                                                   const std::vector<double>& periods = {200.0, 50.0}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Index J = noiseVars;
  for (int s : sizes) J += s;
  Mat X(N, J);
  Index col = 0;
  for (size_t b = 0; b < sizes.size(); ++b) {
    double phase = 2 * std::numbers::pi * u(rng);
    Vec z(N);
    for (Index n = 0; n < N; ++n)
      z(n) = std::sqrt(2.0) * std::sin(2 * std::numbers::pi * static_cast<double>(n) / periods[b] + phase);
    for (int i = 0; i < sizes[b]; ++i, ++col) {
      double load = 0.7 + 0.6 * u(rng);
      for (Index n = 0; n < N; ++n) X(n, col) = load * z(n) + noiseSd * g(rng);
    }
  }
  for (int i = 0; i < noiseVars; ++i, ++col)
    for (Index n = 0; n < N; ++n) X(n, col) = g(rng);
  return standardize_columns(X);
}

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Lasso ||y - X b||^2 + lambda1 ||b||_1 by cyclic coordinate descent.
inline Vec lasso_cd(const Mat& X, const Vec& y, double lambda1, int sweeps = 20000, double tol = 1e-15) {
  const Index J = X.cols();
  Vec b = Vec::Zero(J);
  Vec r = y;
  Vec nrm = X.colwise().squaredNorm().transpose();
  for (int it = 0; it < sweeps; ++it) {
    double delta = 0;
    for (Index j = 0; j < J; ++j) {
      if (nrm(j) == 0) continue;
      double rho = X.col(j).dot(r) + nrm(j) * b(j);
      double nb = soft_threshold(rho, lambda1 / 2) / nrm(j);
      double d = nb - b(j);
      if (d != 0) {
        r -= d * X.col(j);
        b(j) = nb;
        delta = std::max(delta, std::abs(d));
      }
    }
    if (delta < tol) break;
  }
  return b;
}

// Minimizes ||y - X w||^2 + lambda w'Q w + lambda1 ||w||_1 directly, by accelerated
// projected gradient on the split w = p - q with p, q >= 0.
inline Vec elastic_net_pg(const Mat& X, const Vec& y, const Mat& Q, double lambda, double lambda1,
                          int maxIter = 200000) {
  const Index J = X.cols();
  Mat H = 2.0 * (X.transpose() * X + lambda * Q);
  Vec lin = -2.0 * X.transpose() * y;
  double L = 2.0 * Eigen::SelfAdjointEigenSolver<Mat>(H).eigenvalues().maxCoeff();
  Vec z = Vec::Zero(2 * J), zPrev = z, v = z;
  auto grad = [&](const Vec& s) {
    Vec w = s.head(J) - s.tail(J);
    Vec gw = H * w + lin;
    Vec gs(2 * J);
    gs.head(J) = gw.array() + lambda1;
    gs.tail(J) = -gw.array() + lambda1;
    return gs;
  };
  auto f = [&](const Vec& s) {
    Vec w = s.head(J) - s.tail(J);
    return (y - X * w).squaredNorm() + lambda * w.dot(Q * w) + lambda1 * s.sum();
  };
  double t = 1.0, fPrev = f(z);
  for (int it = 0; it < maxIter; ++it) {
    Vec zn = (v - grad(v) / L).cwiseMax(0.0);
    double fn = f(zn);
    if (fn > fPrev) {  // restart momentum
      t = 1.0;
      v = z;
      zn = (v - grad(v) / L).cwiseMax(0.0);
      fn = f(zn);
    }
    double tn = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    v = zn + ((t - 1) / tn) * (zn - z);
    zPrev = z;
    z = zn;
    t = tn;
    if (it > 100 && std::abs(fPrev - fn) <= 1e-16 * std::max(1.0, std::abs(fn)) && (z - zPrev).norm() < 1e-14) break;
    fPrev = fn;
  }
  return z.head(J) - z.tail(J);
}

inline double corr(const Vec& a, const Vec& b) {
  Vec x = a.array() - a.mean();
  Vec y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

inline Mat random_spd(std::mt19937_64& rng, Index J, double floor = 0.1) {
  Mat A = gaussian(rng, J, J);
  Mat S = A * A.transpose() / static_cast<double>(J);
  S.diagonal().array() += floor;
  return S;
}

// Symmetric square root P L^{1/2} P'.
inline Mat sym_sqrt(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace testsupport
