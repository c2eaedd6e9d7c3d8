#include <random>
#include <sstream>

#include "doctest.h"
#include "ssfamon/data.hpp"
#include "ssfamon/simgen.hpp"
#include "support/helpers.hpp"

using namespace ssfamon;

TEST_SUITE("data") {
  TEST_CASE("parse small csv") {
    std::istringstream in("a,b\n1,2\n3,4\n5,6\n");
    RawDataset d = parse_csv(in);
    CHECK(d.names == std::vector<std::string>{"a", "b"});
    REQUIRE(d.values.rows() == 3);
    REQUIRE(d.values.cols() == 2);
    CHECK(d.values(2, 1) == 6.0);
    CHECK(d.values(1, 0) == 3.0);
  }

  TEST_CASE("nan cell is rejected with its location") {
    std::istringstream in("a,b\n1,2\n3,NaN\n5,6\n");
    try {
      parse_csv(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      std::string msg = e.what();
      CHECK(msg.find("row 3") != std::string::npos);
      CHECK(msg.find("b") != std::string::npos);
      CHECK(e.exit_code() == 2);
    }
  }

  TEST_CASE("ragged and malformed rows are rejected") {
    std::istringstream ragged("a,b\n1,2\n3\n4,5\n");
    CHECK_THROWS_AS(parse_csv(ragged), DataError);
    std::istringstream junk("a,b\n1,2\n3,x4\n4,5\n");
    CHECK_THROWS_AS(parse_csv(junk), DataError);
    std::istringstream inf("a\n1\ninf\n2\n");
    CHECK_THROWS_AS(parse_csv(inf), DataError);
    std::istringstream shortFile("a\n1\n2\n");
    CHECK_THROWS_AS(parse_csv(shortFile), DataError);
  }

  TEST_CASE("simulated 33-variable csv round trips exactly") {
    ScenarioConfig cfg;
    cfg.samples = 500;
    cfg.blocks = 7;
    cfg.noiseVars = 5;
    cfg.seed = 11;
    RawDataset d = simulate(cfg).data;
    REQUIRE(d.values.cols() == 33);
    std::stringstream buf;
    write_csv(buf, d);
    RawDataset back = parse_csv(buf);
    CHECK(back.names == d.names);
    REQUIRE(back.values.rows() == 500);
    CHECK((back.values - d.values).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("standardizer by definition") {
    RawDataset d{{"x"}, Mat(3, 1)};
    d.values << 1, 2, 3;
    Standardizer s = fit_standardizer(d);
    CHECK(s.mean(0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.std(0) == doctest::Approx(1.0).epsilon(1e-15));

    RawDataset c{{"flat"}, Mat::Constant(3, 1, 5.0)};
    try {
      fit_standardizer(c);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("flat") != std::string::npos);
    }
  }

  TEST_CASE("standardizer Monte Carlo") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(3.0, 2.0);
    RawDataset d{{"x"}, Mat(10000, 1)};
    for (Index i = 0; i < 10000; ++i) d.values(i, 0) = g(rng);
    Standardizer s = fit_standardizer(d);
    CHECK(std::abs(s.mean(0) - 3.0) < 0.1);
    CHECK(std::abs(s.std(0) - 2.0) < 0.1);
  }

  TEST_CASE("standardize arithmetic") {
    Standardizer s{Vec::Constant(1, 2.0), Vec::Constant(1, 2.0)};
    Mat v(2, 1);
    v << 2, 4;
    StandardizedMatrix z = standardize(v, s);
    CHECK(z.X(0, 0) == 0.0);
    CHECK(z.X(1, 0) == 1.0);
    REQUIRE(z.Xdot.rows() == 1);
    CHECK(z.Xdot(0, 0) == 1.0);
    CHECK_THROWS_AS(standardize(Mat::Zero(2, 2), s), DataError);
  }

  TEST_CASE("training standardization and difference invariants") {
    std::mt19937_64 rng(8);
    Mat raw = testsupport::gaussian(rng, 400, 5);
    raw.col(2) = raw.col(2) * 50.0 + Vec::Constant(400, 1e3);
    StandardizedMatrix z = testsupport::standardize_columns(raw);
    for (Index j = 0; j < 5; ++j) {
      Vec c = z.X.col(j);
      double mean = c.mean();
      double var = (c.array() - mean).square().sum() / 399.0;
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(var - 1.0) < 1e-6);
    }
    REQUIRE(z.Xdot.rows() == 399);
    Mat rebuilt(400, 5);
    rebuilt.row(0) = z.X.row(0);
    for (Index n = 1; n < 400; ++n) rebuilt.row(n) = rebuilt.row(n - 1) + z.Xdot.row(n - 1);
    CHECK((rebuilt - z.X).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("shifted test data keeps its offset") {
    std::mt19937_64 rng(9);
    RawDataset train{{"a", "b"}, testsupport::gaussian(rng, 5000, 2)};
    Standardizer s = fit_standardizer(train);
    Mat test = testsupport::gaussian(rng, 5000, 2);
    test.col(0) = test.col(0).array() + s.std(0);
    StandardizedMatrix z = standardize(test, s);
    CHECK(std::abs(z.X.col(0).mean() - 1.0) < 0.05);
    CHECK(std::abs(z.X.col(1).mean()) < 0.05);
  }

  TEST_CASE("covariances of iid columns") {
    std::mt19937_64 rng(10);
    StandardizedMatrix z = testsupport::standardize_columns(testsupport::gaussian(rng, 20000, 3));
    Covariances c = covariances(z);
    CHECK((c.omega - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
    CHECK((c.omegaDot - 2.0 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
  }

  TEST_CASE("duplicated column: perfect correlation and ridge floor") {
    std::mt19937_64 rng(12);
    Mat raw = testsupport::gaussian(rng, 300, 3);
    raw.col(1) = raw.col(0);
    Covariances c = covariances(testsupport::standardize_columns(raw));
    CHECK(c.omega(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((c.omega - c.omega.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c.omegaDot - c.omegaDot.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    double minEig = Eigen::SelfAdjointEigenSolver<Mat>(c.omegaDot).eigenvalues().minCoeff();
    CHECK(c.ridge > 0);
    CHECK(minEig >= c.ridge * (1 - 1e-6));
    CHECK(c.ridge == doctest::Approx(1e-8 * (c.omegaDot.trace() - 3 * c.ridge) / 3).epsilon(1e-9));
  }

  TEST_CASE("ramp: constant difference, Rayleigh ratio equals slowness") {
    Mat raw(100, 1);
    for (Index n = 0; n < 100; ++n) raw(n, 0) = static_cast<double>(n);
    StandardizedMatrix z = testsupport::standardize_columns(raw);
    Covariances c = covariances(z);
    Vec d = z.Xdot.col(0);
    CHECK((d.array() - d(0)).abs().maxCoeff() < 1e-12);
    double sdotss = d.squaredNorm() / z.X.col(0).squaredNorm();
    CHECK(c.omegaDot(0, 0) / c.omega(0, 0) == doctest::Approx(sdotss).epsilon(1e-7));
  }
}
