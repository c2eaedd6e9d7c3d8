#include <random>

#include "doctest.h"
#include "ssfamon/larsen.hpp"
#include "support/helpers.hpp"

using namespace ssfamon;
using testsupport::gaussian;

namespace {

// Largest KKT violation of ||y - X b||^2 + l1 ||b||_1 at b.
double kkt_violation(const Mat& X, const Vec& y, const Vec& b, double l1) {
  Vec g = 2.0 * X.transpose() * (y - X * b);
  double worst = 0;
  for (Index j = 0; j < b.size(); ++j) {
    if (b(j) != 0)
      worst = std::max(worst, std::abs(g(j) - l1 * (b(j) > 0 ? 1.0 : -1.0)));
    else
      worst = std::max(worst, std::abs(g(j)) - l1);
  }
  return worst;
}

ElasticNetProblem random_problem(std::mt19937_64& rng, Index N, Index J, double lambda) {
  ElasticNetProblem p;
  p.design = gaussian(rng, N, J);
  p.target = gaussian(rng, N, 1).col(0);
  p.lambda = lambda;
  Mat omegaDot = testsupport::random_spd(rng, J);
  p.omegaDotFactor = testsupport::sym_sqrt(omegaDot);
  p.omega = testsupport::random_spd(rng, J);
  return p;
}

}  // namespace

TEST_SUITE("larsen") {
  TEST_CASE("augmentation blocks") {
    std::mt19937_64 rng(1);
    ElasticNetProblem p;
    p.design = gaussian(rng, 6, 3);
    p.target = gaussian(rng, 6, 1).col(0);
    p.omegaDotFactor = Mat::Identity(3, 3);
    p.lambda = 0;
    AugmentedProblem a0 = augment(p);
    CHECK(a0.scale == 1.0);
    CHECK((a0.design.topRows(6) - p.design).norm() == 0.0);
    CHECK(a0.design.bottomRows(3).norm() == 0.0);
    CHECK((a0.target.head(6) - p.target).norm() == 0.0);
    CHECK(a0.target.tail(3).norm() == 0.0);

    p.lambda = 3;
    AugmentedProblem a3 = augment(p);
    CHECK(a3.scale == doctest::Approx(2.0));
    CHECK((a3.design.topRows(6) - p.design / 2).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((a3.design.bottomRows(3) - std::sqrt(3.0) / 2 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("factor reproduces omegaDot") {
    std::mt19937_64 rng(2);
    Mat S = testsupport::random_spd(rng, 7);
    Mat F = testsupport::sym_sqrt(S);
    CHECK((F * F.transpose() - S).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("augmented objective equals the generalized objective after rescaling") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
      Index J = 1 + static_cast<Index>(rng() % 8);
      Index N = 5 + static_cast<Index>(rng() % 46);
      double lambda = std::uniform_real_distribution<double>(0.0, 4.0)(rng);
      double l1 = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
      ElasticNetProblem p = random_problem(rng, N, J, lambda);
      AugmentedProblem a = augment(p);
      Vec w = gaussian(rng, J, 1).col(0);
      Vec beta = a.scale * w;
      double aug = (a.target - a.design * beta).squaredNorm() + (l1 / a.scale) * beta.lpNorm<1>();
      double orig = elastic_net_objective(p, w, l1);
      CHECK(std::abs(aug - orig) <= 1e-8 * std::max(1.0, orig));
    }
  }

  TEST_CASE("zero target gives a single zero breakpoint") {
    std::mt19937_64 rng(4);
    LarsPath path = lars_en_path(gaussian(rng, 10, 4), Vec::Zero(10), 4);
    REQUIRE(path.breakpoints.size() == 1);
    CHECK(path.breakpoints[0].coefficients.norm() == 0.0);
  }

  TEST_CASE("orthonormal design matches soft thresholding") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
      Mat Q = Eigen::HouseholderQR<Mat>(gaussian(rng, 30, 6)).householderQ() * Mat::Identity(30, 6);
      Vec y = gaussian(rng, 30, 1).col(0);
      LarsPath path = lars_en_path(Q, y, 6);
      Vec c = Q.transpose() * y;
      CHECK(path.breakpoints.size() == 7);
      auto check_at = [&](double l1, const Vec& b) {
        for (Index j = 0; j < 6; ++j) CHECK(std::abs(b(j) - testsupport::soft_threshold(c(j), l1 / 2)) < 1e-8);
      };
      for (const auto& bp : path.breakpoints) check_at(bp.lambda1, bp.coefficients);
      for (size_t i = 0; i + 1 < path.breakpoints.size(); ++i) {
        double mid = 0.5 * (path.breakpoints[i].lambda1 + path.breakpoints[i + 1].lambda1);
        check_at(mid, path_at(path, mid));
      }
    }
  }

  TEST_CASE("KKT holds at every breakpoint") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 200; ++rep) {
      Index J = 1 + static_cast<Index>(rng() % 10);
      Index N = 3 + static_cast<Index>(rng() % 40);
      Mat X = gaussian(rng, N, J);
      if (rep % 3 == 0 && J > 1) X.col(1) = 0.9 * X.col(0) + 0.1 * X.col(1);
      Vec y = gaussian(rng, N, 1).col(0);
      LarsPath path = lars_en_path(X, y, static_cast<int>(J));
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& bp : path.breakpoints) {
        CHECK(bp.lambda1 < prev);
        prev = bp.lambda1;
        CHECK(kkt_violation(X, y, bp.coefficients, bp.lambda1) <= 1e-8 * std::max(1.0, bp.lambda1));
        CHECK(bp.fitError == doctest::Approx((y - X * bp.coefficients).squaredNorm()).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("two correlated columns: inactive correlation bounded by active") {
    std::mt19937_64 rng(7);
    Mat X = gaussian(rng, 40, 2);
    X.col(1) = 0.8 * X.col(0) + 0.6 * X.col(1);
    Vec y = X.col(0) + 0.5 * gaussian(rng, 40, 1).col(0);
    LarsPath path = lars_en_path(X, y, 2);
    for (const auto& bp : path.breakpoints) {
      Vec c = (X.transpose() * (y - X * bp.coefficients)).cwiseAbs();
      double act = 0, inact = 0;
      for (Index j = 0; j < 2; ++j) {
        if (bp.coefficients(j) != 0)
          act = std::max(act, c(j));
        else
          inact = std::max(inact, c(j));
      }
      if (act > 0) CHECK(inact <= act + 1e-10);
    }
  }

  TEST_CASE("path agrees with coordinate descent between breakpoints") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 20; ++rep) {
      Mat X = gaussian(rng, 30, 5);
      X.col(3) += 0.7 * X.col(2);
      Vec y = gaussian(rng, 30, 1).col(0);
      LarsPath path = lars_en_path(X, y, 5);
      for (size_t i = 0; i + 1 < path.breakpoints.size(); ++i) {
        double l1 = 0.3 * path.breakpoints[i].lambda1 + 0.7 * path.breakpoints[i + 1].lambda1;
        Vec cd = testsupport::lasso_cd(X, y, l1);
        CHECK((path_at(path, l1) - cd).cwiseAbs().maxCoeff() < 1e-7);
      }
    }
  }

  TEST_CASE("generalized elastic net matches a projected-gradient oracle") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 20; ++rep) {
      Index J = 1 + static_cast<Index>(rng() % 8);
      Index N = 5 + static_cast<Index>(rng() % 46);
      double lambda = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
      ElasticNetProblem p = random_problem(rng, N, J, lambda);
      double l1 = std::uniform_real_distribution<double>(0.05, 1.0)(rng) * 2 * (p.design.transpose() * p.target).cwiseAbs().maxCoeff();
      ElasticNetSolution sol = solve_gen_elastic_net(p, Lambda1Rule::fixed(l1), static_cast<int>(J));
      Mat Q = p.omegaDotFactor * p.omegaDotFactor.transpose();
      Vec oracle = testsupport::elastic_net_pg(p.design, p.target, Q, lambda, l1);
      double a = elastic_net_objective(p, sol.w, l1);
      double b = elastic_net_objective(p, oracle, l1);
      CHECK(a <= b + 1e-6 * std::max(1.0, b));
      CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, b));
    }
  }

  TEST_CASE("fixed rules: infinite penalty and least squares limit") {
    std::mt19937_64 rng(10);
    ElasticNetProblem p = random_problem(rng, 30, 4, 0.0);
    ElasticNetSolution inf = solve_gen_elastic_net(p, Lambda1Rule::fixed(std::numeric_limits<double>::infinity()), 4);
    CHECK(inf.w.norm() == 0.0);
    ElasticNetSolution ls = solve_gen_elastic_net(p, Lambda1Rule::fixed(0.0), 4);
    Vec ref = p.design.colPivHouseholderQr().solve(p.target);
    CHECK((ls.w - ref).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("best-fit-error selects the exhaustive minimum") {
    std::mt19937_64 rng(11);
    for (int maxActive : {1, 2, 4}) {
      ElasticNetProblem p = random_problem(rng, 25, 6, 0.7);
      ElasticNetSolution sol = solve_gen_elastic_net(p, Lambda1Rule::best_fit_error(), maxActive);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& bp : sol.path.breakpoints) {
        long support = (bp.coefficients.array() != 0).count();
        CHECK(support <= maxActive);
        best = std::min(best, bp.fitError);
      }
      REQUIRE(sol.breakpoint >= 0);
      CHECK(sol.path.breakpoints[static_cast<size_t>(sol.breakpoint)].fitError == best);
      CHECK((sol.w.array() != 0).count() <= maxActive);
    }
  }

  TEST_CASE("min-slowness picks the sparsest near-minimal breakpoint") {
    std::mt19937_64 rng(12);
    ElasticNetProblem p = random_problem(rng, 40, 6, 1.5);
    ElasticNetSolution sol = solve_gen_elastic_net(p, Lambda1Rule::min_slowness(0.05), 6);
    Mat Od = p.omegaDotFactor * p.omegaDotFactor.transpose();
    auto sl = [&](const Vec& w) { return w.dot(Od * w) / w.dot(p.omega * w); };
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& bp : sol.path.breakpoints)
      if (bp.coefficients.norm() > 0) lo = std::min(lo, sl(bp.coefficients));
    REQUIRE(sol.breakpoint >= 0);
    CHECK(sl(sol.w) <= lo * 1.05 + 1e-12);
    for (int i = 0; i < sol.breakpoint; ++i) {
      const Vec& c = sol.path.breakpoints[static_cast<size_t>(i)].coefficients;
      if (c.norm() > 0) CHECK(sl(c) > lo * 1.05);
    }
  }

  TEST_CASE("shrinkage monotonicity and local optimality") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
      ElasticNetProblem p = random_problem(rng, 30, 5, 0.5);
      AugmentedProblem a = augment(p);
      LarsPath path = lars_en_path(a.design, a.target, 5);
      double prevNorm = -1;
      for (const auto& bp : path.breakpoints) {
        CHECK(bp.coefficients.lpNorm<1>() >= prevNorm - 1e-12);
        prevNorm = bp.coefficients.lpNorm<1>();
        auto f = [&](const Vec& b) { return (a.target - a.design * b).squaredNorm() + bp.lambda1 * b.lpNorm<1>(); };
        double f0 = f(bp.coefficients);
        for (int probe = 0; probe < 50; ++probe) {
          Vec b = bp.coefficients;
          for (Index j = 0; j < 5; ++j)
            if (b(j) != 0) b(j) += (rng() & 1) ? 1e-3 : -1e-3;
          CHECK(f(b) >= f0 - 1e-12);
        }
      }
    }
  }

  TEST_CASE("support cap is respected") {
    std::mt19937_64 rng(14);
    Mat X = gaussian(rng, 50, 8);
    Vec y = gaussian(rng, 50, 1).col(0);
    for (int cap = 1; cap <= 8; ++cap) {
      LarsPath path = lars_en_path(X, y, cap);
      for (const auto& bp : path.breakpoints) CHECK((bp.coefficients.array() != 0).count() <= cap);
    }
  }

  TEST_CASE("more columns than rows") {
    std::mt19937_64 rng(15);
    Mat X = gaussian(rng, 6, 10);
    Vec y = gaussian(rng, 6, 1).col(0);
    LarsPath path = lars_en_path(X, y, 10);
    for (const auto& bp : path.breakpoints) {
      CHECK((bp.coefficients.array() != 0).count() <= 6);
      CHECK(kkt_violation(X, y, bp.coefficients, bp.lambda1) <= 1e-8 * std::max(1.0, bp.lambda1));
    }
  }

  TEST_CASE("lambda1 rule text round trip") {
    for (std::string s : {"fixed:0.25", "fixed:inf", "best-fit-error", "min-slowness:0.05", "min-slowness:0"}) {
      Lambda1Rule r = Lambda1Rule::parse(s);
      CHECK(Lambda1Rule::parse(r.to_string()).to_string() == r.to_string());
    }
    CHECK(Lambda1Rule::parse("min-slowness").kind == Lambda1Rule::Kind::MinSlowness);
    CHECK(std::isinf(Lambda1Rule::parse("fixed:inf").value));
    for (std::string s : {"fixed:", "fixed:-1", "slowest", "fixed:1x", "min-slowness:abc"})
      CHECK_THROWS_AS(Lambda1Rule::parse(s), UsageError);
  }

  TEST_CASE("identical columns share the coefficient equally") {
    std::mt19937_64 rng(16);
    ElasticNetProblem p;
    Mat base = gaussian(rng, 40, 3);
    p.design.resize(40, 4);
    p.design << base.col(0), base.col(1), base.col(0), base.col(2);
    p.target = 2.0 * base.col(0) + 0.3 * gaussian(rng, 40, 1).col(0);
    p.lambda = 1.0;
    Mat od = p.design.transpose() * p.design / 39.0;
    od.diagonal().array() += 1e-8;
    p.omegaDotFactor = testsupport::sym_sqrt(od);
    for (double l1 : {0.5, 5.0, 20.0}) {
      ElasticNetSolution sol = solve_gen_elastic_net(p, Lambda1Rule::fixed(l1), 4);
      CHECK(sol.w(0) == sol.w(2));
      Vec oracle = testsupport::elastic_net_pg(p.design, p.target, od, p.lambda, l1);
      double a = elastic_net_objective(p, sol.w, l1), b = elastic_net_objective(p, oracle, l1);
      CHECK(a <= b + 1e-6 * std::max(1.0, b));
    }
  }
}
