#include "ssfamon/larsen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ssfamon {

Lambda1Rule Lambda1Rule::parse(const std::string& text) {
  auto bad = [&]() { return UsageError("invalid lambda1 rule '" + text + "'"); };
  auto number = [&](const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != s.size() || !(v >= 0)) throw bad();
    return v;
  };
  if (text == "best-fit-error") return best_fit_error();
  if (text == "min-slowness") return min_slowness();
  const std::string ms = "min-slowness:";
  if (text.rfind(ms, 0) == 0) return min_slowness(number(text.substr(ms.size())));
  const std::string fx = "fixed:";
  if (text.rfind(fx, 0) == 0) return fixed(number(text.substr(fx.size())));
  throw bad();
}

std::string Lambda1Rule::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Fixed:
      os << "fixed:";
      if (std::isinf(value))
        os << "inf";
      else
        os << value;
      break;
    case Kind::BestFitError:
      os << "best-fit-error";
      break;
    case Kind::MinSlowness:
      os << "min-slowness:" << slack;
      break;
  }
  return os.str();
}

AugmentedProblem augment(const ElasticNetProblem& p) {
  if (!(p.lambda >= 0)) throw std::invalid_argument("lambda must be nonnegative");
  const Index N = p.design.rows();
  const Index J = p.design.cols();
  if (p.target.size() != N) throw std::invalid_argument("target length does not match design rows");
  if (p.omegaDotFactor.rows() != J || p.omegaDotFactor.cols() != J)
    throw std::invalid_argument("omegaDotFactor must be J x J");
  AugmentedProblem a;
  a.scale = std::sqrt(1.0 + p.lambda);
  a.design.resize(N + J, J);
  a.design.topRows(N) = p.design / a.scale;
  a.design.bottomRows(J) = std::sqrt(p.lambda) * p.omegaDotFactor.transpose() / a.scale;
  a.target = Vec::Zero(N + J);
  a.target.head(N) = p.target;
  return a;
}

namespace {

int argmax_abs(const Vec& c, const std::vector<char>& eligible) {
  int best = -1;
  double bv = -1;
  for (Index j = 0; j < c.size(); ++j) {
    if (!eligible[j]) continue;
    double v = std::abs(c(j));
    if (v > bv) {
      bv = v;
      best = static_cast<int>(j);
    }
  }
  return best;
}

Mat sub_gram(const Mat& G, const std::vector<int>& A) {
  const Index k = static_cast<Index>(A.size());
  Mat S(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) S(a, b) = G(A[a], A[b]);
  return S;
}

}  // namespace

LarsPath lars_en_path(const Mat& X, const Vec& y, int maxActive) {
  const Index J = X.cols();
  if (y.size() != X.rows()) throw std::invalid_argument("target length does not match design rows");
  if (maxActive <= 0 || maxActive > J) maxActive = static_cast<int>(J);

  const Mat G = X.transpose() * X;
  const Vec Xty = X.transpose() * y;
  Vec beta = Vec::Zero(J);
  LarsPath path;

  auto record = [&](double lam) {
    Breakpoint bp;
    bp.lambda1 = 2.0 * std::max(lam, 0.0);
    bp.coefficients = beta;
    bp.fitError = (y - X * beta).squaredNorm();
    if (!path.breakpoints.empty() && !(bp.lambda1 < path.breakpoints.back().lambda1 * (1.0 - 1e-12))) {
      // zero-length step: keep one breakpoint per lambda1
      bp.lambda1 = path.breakpoints.back().lambda1;
      path.breakpoints.back() = bp;
    } else {
      path.breakpoints.push_back(bp);
    }
  };

  std::vector<char> eligible(J, 1);
  for (Index j = 0; j < J; ++j)
    if (G(j, j) <= 0) eligible[j] = 0;

  Vec c = Xty;
  int first = argmax_abs(c, eligible);
  double lam = first < 0 ? 0.0 : std::abs(c(first));
  record(lam);
  const double lam0 = lam;
  if (first < 0 || lam <= 1e-300) return path;

  std::vector<int> active;
  std::vector<double> signs;
  std::vector<char> inActive(J, 0);
  int justDropped = -1;

  // Schur-complement pivot of j against the active set, relative to G_jj.
  auto pivot = [&](int j) {
    if (active.empty()) return 1.0;
    Mat GAA = sub_gram(G, active);
    Vec gAj(static_cast<Index>(active.size()));
    for (size_t a = 0; a < active.size(); ++a) gAj(static_cast<Index>(a)) = G(active[a], j);
    Eigen::LDLT<Mat> ldlt(GAA);
    double p = G(j, j) - gAj.dot(ldlt.solve(gAj));
    return p / G(j, j);
  };

  auto add = [&](int j, double sgn) {
    if (pivot(j) < 1e-12) {
      eligible[j] = 0;  // collinear with the active set; never enters
      return false;
    }
    active.push_back(j);
    signs.push_back(sgn);
    inActive[j] = 1;
    return true;
  };

  add(first, c(first) >= 0 ? 1.0 : -1.0);

  const int maxSteps = 16 * static_cast<int>(J) + 64;
  for (int step = 0; step < maxSteps; ++step) {
    c = Xty - G * beta;
    if (active.empty()) {
      std::vector<char> elig = eligible;
      if (justDropped >= 0) elig[justDropped] = 0;
      int j = argmax_abs(c, elig);
      if (j < 0) {
        lam = 0;
        record(lam);
        break;
      }
      add(j, c(j) >= 0 ? 1.0 : -1.0);
      continue;
    }

    const Index k = static_cast<Index>(active.size());
    Mat GAA = sub_gram(G, active);
    Vec sA(k);
    for (Index a = 0; a < k; ++a) sA(a) = signs[a];
    Eigen::LLT<Mat> llt(GAA);
    if (llt.info() != Eigen::Success) throw NumericalError("active-set Gram matrix is singular");
    Vec dA = llt.solve(sA);
    if (!dA.allFinite()) throw NumericalError("active-set Gram matrix is singular");
    Vec a = Vec::Zero(J);
    for (Index t = 0; t < k; ++t) a += G.col(active[t]) * dA(t);

    double gEnd = lam;
    double gEntry = std::numeric_limits<double>::infinity();
    int jEntry = -1;
    for (Index j = 0; j < J; ++j) {
      if (inActive[j] || !eligible[j]) continue;
      double best = std::numeric_limits<double>::infinity();
      double den1 = 1.0 - a(j), den2 = 1.0 + a(j);
      if (static_cast<int>(j) == justDropped) {
        // its zero-length re-entry root is spurious; only a later crossing counts
        const double floor = 1e-10 * lam;
        if (den1 > 1e-12 && (lam - c(j)) / den1 > floor) best = std::min(best, (lam - c(j)) / den1);
        if (den2 > 1e-12 && (lam + c(j)) / den2 > floor) best = std::min(best, (lam + c(j)) / den2);
      } else {
        if (den1 > 1e-12) best = std::min(best, std::max(0.0, (lam - c(j)) / den1));
        if (den2 > 1e-12) best = std::min(best, std::max(0.0, (lam + c(j)) / den2));
      }
      if (best < gEntry) {
        gEntry = best;
        jEntry = static_cast<int>(j);
      }
    }
    double gDrop = std::numeric_limits<double>::infinity();
    int tDrop = -1;
    for (Index t = 0; t < k; ++t) {
      double b = beta(active[t]);
      if (b == 0.0 || dA(t) == 0.0) continue;
      double g = -b / dA(t);
      if (g > 0 && g < gDrop) {
        gDrop = g;
        tDrop = static_cast<int>(t);
      }
    }

    double gamma = std::min({gEnd, gEntry, gDrop});
    for (Index t = 0; t < k; ++t) beta(active[t]) += gamma * dA(t);
    lam -= gamma;
    if (lam < 1e-15 * lam0) lam = 0;

    if (gamma == gDrop && gDrop <= gEntry && gDrop < gEnd) {
      int j = active[tDrop];
      beta(j) = 0.0;
      active.erase(active.begin() + tDrop);
      signs.erase(signs.begin() + tDrop);
      inActive[j] = 0;
      justDropped = j;
      record(lam);
      if (lam <= 0) break;
      continue;
    }
    justDropped = -1;
    if (jEntry >= 0 && gamma == gEntry && gEntry < gEnd) {
      record(lam);
      if (static_cast<int>(active.size()) >= maxActive) break;
      double cj = c(jEntry) - gamma * a(jEntry);
      add(jEntry, cj >= 0 ? 1.0 : -1.0);
      if (lam <= 0) break;
      continue;
    }
    lam = 0;
    record(lam);
    break;
  }
  return path;
}

Vec path_at(const LarsPath& path, double lambda1) {
  const auto& bps = path.breakpoints;
  if (bps.empty()) throw std::invalid_argument("empty path");
  if (lambda1 >= bps.front().lambda1) return bps.front().coefficients;
  for (size_t i = 0; i + 1 < bps.size(); ++i) {
    const auto& hi = bps[i];
    const auto& lo = bps[i + 1];
    if (lambda1 >= lo.lambda1) {
      double t = (hi.lambda1 - lambda1) / (hi.lambda1 - lo.lambda1);
      return hi.coefficients + t * (lo.coefficients - hi.coefficients);
    }
  }
  return bps.back().coefficients;
}

namespace {

// Groups of identical design columns; representative first.
std::vector<std::vector<int>> duplicate_groups(const Mat& X) {
  const Index J = X.cols();
  std::vector<int> owner(J, -1);
  std::vector<std::vector<int>> groups;
  for (Index j = 0; j < J; ++j) {
    if (owner[j] >= 0) continue;
    owner[j] = static_cast<int>(groups.size());
    groups.push_back({static_cast<int>(j)});
    double nj = X.col(j).squaredNorm();
    for (Index i = j + 1; i < J; ++i) {
      if (owner[i] >= 0) continue;
      if ((X.col(i) - X.col(j)).squaredNorm() <= 1e-24 * std::max(nj, 1e-300)) {
        owner[i] = owner[j];
        groups.back().push_back(static_cast<int>(i));
      }
    }
  }
  return groups;
}

Vec expand(const Vec& reduced, const std::vector<std::vector<int>>& groups, Index J) {
  Vec w = Vec::Zero(J);
  for (size_t g = 0; g < groups.size(); ++g)
    for (int j : groups[g]) w(j) = reduced(static_cast<Index>(g)) / static_cast<double>(groups[g].size());
  return w;
}

}  // namespace

ElasticNetSolution solve_gen_elastic_net(const ElasticNetProblem& problem, const Lambda1Rule& rule, int maxActive) {
  // Identical columns share their coefficient equally, as the strictly convex
  // penalty requires; solve on one representative per group.
  const Index J = problem.design.cols();
  auto groups = duplicate_groups(problem.design);
  if (static_cast<Index>(groups.size()) < J) {
    std::vector<int> reps;
    for (const auto& g : groups) reps.push_back(g.front());
    ElasticNetProblem red;
    red.design = select_columns(problem.design, reps);
    red.target = problem.target;
    red.lambda = problem.lambda;
    Mat od = problem.omegaDotFactor * problem.omegaDotFactor.transpose();
    Mat odr(static_cast<Index>(reps.size()), static_cast<Index>(reps.size()));
    for (size_t a = 0; a < reps.size(); ++a)
      for (size_t b = 0; b < reps.size(); ++b) odr(a, b) = od(reps[a], reps[b]);
    Eigen::SelfAdjointEigenSolver<Mat> es(odr);
    red.omegaDotFactor = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                         es.eigenvectors().transpose();
    if (problem.omega.rows() == J) {
      red.omega.resize(odr.rows(), odr.cols());
      for (size_t a = 0; a < reps.size(); ++a)
        for (size_t b = 0; b < reps.size(); ++b) red.omega(a, b) = problem.omega(reps[a], reps[b]);
    }
    ElasticNetSolution sol = solve_gen_elastic_net(red, rule, maxActive);
    sol.w = expand(sol.w, groups, J);
    for (auto& bp : sol.path.breakpoints) bp.coefficients = expand(bp.coefficients, groups, J);
    return sol;
  }

  AugmentedProblem aug = augment(problem);
  ElasticNetSolution sol;
  sol.scale = aug.scale;
  sol.path = lars_en_path(aug.design, aug.target, maxActive);
  const auto& bps = sol.path.breakpoints;

  auto take = [&](size_t i) {
    sol.breakpoint = static_cast<int>(i);
    sol.w = bps[i].coefficients / aug.scale;
    sol.lambda1Used = bps[i].lambda1 * aug.scale;
  };

  switch (rule.kind) {
    case Lambda1Rule::Kind::Fixed: {
      if (std::isinf(rule.value)) {
        take(0);
        sol.lambda1Used = rule.value;
        break;
      }
      double lhat = rule.value / aug.scale;
      if (lhat < bps.back().lambda1) {
        take(bps.size() - 1);
        break;
      }
      sol.breakpoint = -1;
      sol.w = path_at(sol.path, lhat) / aug.scale;
      sol.lambda1Used = rule.value;
      break;
    }
    case Lambda1Rule::Kind::BestFitError: {
      size_t best = 0;
      for (size_t i = 1; i < bps.size(); ++i)
        if (bps[i].fitError < bps[best].fitError) best = i;
      take(best);
      break;
    }
    case Lambda1Rule::Kind::MinSlowness: {
      if (problem.omega.rows() != problem.design.cols())
        throw std::invalid_argument("min-slowness rule needs the covariance matrix omega");
      const Mat omegaDot = problem.omegaDotFactor * problem.omegaDotFactor.transpose();
      std::vector<double> sl(bps.size(), std::numeric_limits<double>::infinity());
      double lo = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < bps.size(); ++i) {
        const Vec& w = bps[i].coefficients;
        if (w.cwiseAbs().maxCoeff() == 0.0) continue;
        double den = w.dot(problem.omega * w);
        if (!(den > 0)) continue;
        sl[i] = w.dot(omegaDot * w) / den;
        lo = std::min(lo, sl[i]);
      }
      size_t pick = 0;
      if (std::isfinite(lo)) {
        for (size_t i = 0; i < bps.size(); ++i)
          if (sl[i] <= lo * (1.0 + rule.slack)) {
            pick = i;
            break;
          }
      }
      take(pick);
      break;
    }
  }
  return sol;
}

double elastic_net_objective(const ElasticNetProblem& p, const Vec& w, double lambda1) {
  double fit = (p.target - p.design * w).squaredNorm();
  double quad = (p.omegaDotFactor.transpose() * w).squaredNorm();
  double l1 = lambda1 == 0 ? 0.0 : lambda1 * w.lpNorm<1>();
  return fit + p.lambda * quad + l1;
}

}  // namespace ssfamon
