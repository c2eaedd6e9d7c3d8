#include "ssfamon/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ssfamon/sfa.hpp"

namespace ssfamon {

Vec slowness_vector(const Mat& S, const Mat& Sdot) {
  const Index N = S.rows();
  if (Sdot.rows() != N - 1 || Sdot.cols() != S.cols()) throw std::invalid_argument("feature/temporal shape mismatch");
  StandardizedMatrix fm{S, Sdot};
  Covariances cov = covariances(fm);
  Eigen::LDLT<Mat> xi(cov.omega), xid(cov.omegaDot);
  if (xid.info() != Eigen::Success || !xid.isPositive())
    throw NumericalError("temporal feature covariance is singular");
  Mat a = xid.solve(Sdot.transpose());
  Mat b = xi.solve(S.bottomRows(N - 1).transpose());
  Vec out(N - 1);
  for (Index n = 0; n < N - 1; ++n) {
    double num = Sdot.row(n).dot(a.col(n));
    double den = S.row(n + 1).dot(b.col(n));
    out(n) = std::max(0.0, num) / std::max(den, std::numeric_limits<double>::min());
  }
  return out;
}

RankTestResult signed_rank_test(const Vec& a, const Vec& b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("signed-rank test needs paired samples of equal length");
  if (a.size() < 5) throw std::invalid_argument("signed-rank test needs at least 5 pairs");
  std::vector<double> d;
  for (Index i = 0; i < a.size(); ++i) {
    double v = a(i) - b(i);
    if (v != 0.0) d.push_back(v);
  }
  RankTestResult r;
  r.n = static_cast<int>(d.size());
  if (r.n == 0) {
    r.p = 1.0;
    r.sameSlowness = true;
    return r;
  }
  const int n = r.n;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return std::abs(d[x]) < std::abs(d[y]); });
  // doubled average ranks are integers
  std::vector<long> rank2(n);
  double tieTerm = 0.0;
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && std::abs(d[idx[j + 1]]) == std::abs(d[idx[i]])) ++j;
    long r2 = static_cast<long>(i + 1) + static_cast<long>(j + 1);
    for (int t = i; t <= j; ++t) rank2[idx[t]] = r2;
    double tcount = j - i + 1;
    tieTerm += tcount * tcount * tcount - tcount;
    i = j + 1;
  }
  long w2 = 0;
  for (int i = 0; i < n; ++i)
    if (d[i] > 0) w2 += rank2[i];
  r.statistic = 0.5 * static_cast<double>(w2);

  if (n <= 25) {
    r.exact = true;
    long total = 0;
    for (long v : rank2) total += v;
    std::vector<double> pmf(static_cast<size_t>(total) + 1, 0.0);
    pmf[0] = 1.0;
    long reach = 0;
    for (long v : rank2) {
      for (long s = reach; s >= 0; --s) {
        double q = pmf[s];
        if (q == 0.0) continue;
        pmf[s + v] += 0.5 * q;
        pmf[s] = 0.5 * q;
      }
      reach += v;
    }
    double lo = 0.0, hi = 0.0;
    for (long s = 0; s <= total; ++s) {
      if (s <= w2) lo += pmf[s];
      if (s >= w2) hi += pmf[s];
    }
    r.p = std::min(1.0, 2.0 * std::min(lo, hi));
  } else {
    r.exact = false;
    double nn = n;
    double mu = nn * (nn + 1) / 4.0;
    double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tieTerm / 48.0;
    double dev = std::max(0.0, std::abs(r.statistic - mu) - 0.5);
    double z = var > 0 ? dev / std::sqrt(var) : 0.0;
    r.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }
  r.sameSlowness = r.p >= alpha;
  return r;
}

SubsetPartition partition_variables(const StandardizedMatrix& data, const SsfaConfig& cfg, double alpha) {
  const int J = static_cast<int>(data.X.cols());
  if (J < 2) throw UsageError("partition needs at least 2 variables");
  SubsetPartition part;
  std::vector<int> remaining(J);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<char> assigned(J, 0);
  Vec reference;

  while (remaining.size() >= 2) {
    StandardizedMatrix sub{select_columns(data.X, remaining), select_columns(data.Xdot, remaining)};
    SparseLoading lo = first_sparse_loading(sub, cfg);
    std::vector<int> cand;
    for (int i : lo.support) cand.push_back(remaining[i]);

    StandardizedMatrix cs{select_columns(data.X, cand), select_columns(data.Xdot, cand)};
    SfaModel m = fit_sfa(cs);
    Vec sl = slowness_vector(cs.X * m.W, cs.Xdot * m.W);

    TestRecord rec;
    rec.candidate = cand;
    if (part.sdl.empty()) {
      rec.p = std::numeric_limits<double>::quiet_NaN();
      rec.accepted = true;
    } else {
      RankTestResult t = signed_rank_test(sl, reference, alpha);
      rec.p = t.p;
      rec.accepted = t.sameSlowness;
    }
    part.testTrace.push_back(rec);
    if (!rec.accepted) break;
    part.sdl.push_back(cand);
    reference = sl;
    for (int v : cand) assigned[v] = 1;
    std::vector<int> next;
    for (int v : remaining)
      if (!assigned[v]) next.push_back(v);
    remaining = next;
  }
  for (int v = 0; v < J; ++v)
    if (!assigned[v]) part.sdnl.push_back(v);
  return part;
}

bool partition_is_valid(const SubsetPartition& p, int J) {
  std::vector<int> seen(J, 0);
  for (const auto& s : p.sdl) {
    if (s.empty()) return false;
    for (int v : s) {
      if (v < 0 || v >= J) return false;
      ++seen[v];
    }
  }
  for (int v : p.sdnl) {
    if (v < 0 || v >= J) return false;
    ++seen[v];
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

}  // namespace ssfamon
