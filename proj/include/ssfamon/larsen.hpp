#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ssfamon/common.hpp"

namespace ssfamon {

// min_w ||target - design w||^2 + lambda w'OmegaDot w + lambda1 ||w||_1
// with OmegaDot = omegaDotFactor * omegaDotFactor'.
struct ElasticNetProblem {
  Mat design;
  Vec target;
  double lambda = 0.0;
  Mat omegaDotFactor;
  Mat omega;  // optional; required by the min-slowness rule
};

struct AugmentedProblem {
  Mat design;
  Vec target;
  double scale = 1.0;  // sqrt(1 + lambda); w_hat = scale * w
};

struct Breakpoint {
  double lambda1 = 0.0;  // penalty on ||beta||_1 in ||y - X beta||^2 + lambda1 ||beta||_1
  Vec coefficients;
  double fitError = 0.0;  // residual sum of squares
};

struct LarsPath {
  std::vector<Breakpoint> breakpoints;
};

struct Lambda1Rule {
  enum class Kind { Fixed, BestFitError, MinSlowness };
  Kind kind = Kind::MinSlowness;
  double value = 0.0;   // Fixed: lambda1 on the original problem scale
  double slack = 0.05;  // MinSlowness: accept slowness within (1 + slack) of the path minimum

  static Lambda1Rule fixed(double v) { return {Kind::Fixed, v, 0.0}; }
  static Lambda1Rule best_fit_error() { return {Kind::BestFitError, 0.0, 0.0}; }
  static Lambda1Rule min_slowness(double slack = 0.05) { return {Kind::MinSlowness, 0.0, slack}; }

  // "fixed:<v>" (v may be "inf"), "best-fit-error", "min-slowness" or "min-slowness:<slack>".
  static Lambda1Rule parse(const std::string& text);
  std::string to_string() const;
};

struct ElasticNetSolution {
  Vec w;
  double lambda1Used = 0.0;     // on the original problem scale
  int breakpoint = -1;          // index into path, -1 when interpolated
  LarsPath path;                // path of the augmented problem
  double scale = 1.0;
};

AugmentedProblem augment(const ElasticNetProblem& problem);

// Lasso path by least angle regression with the lasso modification.
// Stops when lambda1 reaches 0, or at the entry event that would exceed maxActive.
LarsPath lars_en_path(const Mat& design, const Vec& target, int maxActive);

// Coefficients on the path at a given lambda1 (piecewise linear interpolation).
Vec path_at(const LarsPath& path, double lambda1);

ElasticNetSolution solve_gen_elastic_net(const ElasticNetProblem& problem, const Lambda1Rule& rule, int maxActive);

// ||target - design w||^2 + lambda ||factor' w||^2 + lambda1 ||w||_1
double elastic_net_objective(const ElasticNetProblem& problem, const Vec& w, double lambda1);

}  // namespace ssfamon
