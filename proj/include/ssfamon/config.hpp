#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ssfamon/ksfa.hpp"
#include "ssfamon/larsen.hpp"
#include "ssfamon/ssfa.hpp"

namespace ssfamon {

// Flat "key = value" file; keys are exactly the field names below.
// kernelGamma is a positive number, "median" (1/(2 median^2)) or "median*<factor>".
struct RunConfig {
  double lambda = 1.5;
  Lambda1Rule lambda1Rule = Lambda1Rule::min_slowness();
  int maxSupport = 0;
  double alpha = 0.05;
  double limitAlpha = 0.95;
  std::string kernelGamma = "median*0.005";
  int policyWindow = 10;
  int clearWindow = 20;
  int maxIter = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
  SsfaConfig ssfa() const;
  KsfaConfig ksfa() const;
};

RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace ssfamon
