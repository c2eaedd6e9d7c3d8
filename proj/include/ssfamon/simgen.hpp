#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssfamon/data.hpp"

namespace ssfamon {

enum class Scenario { Normal, Setpoint, Fault };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

struct ScenarioConfig {
  Scenario scenario = Scenario::Normal;
  int samples = 1000;
  std::uint64_t seed = 0;
  int blocks = 2;
  int noiseVars = 4;
  int changeAt = -1;  // -1: samples / 4

  // plant y(n+1) = a y(n) + b u(n) + d(n) + load(n), PI controller with saturation
  double a = 0.9;
  double b = 0.5;
  double kp = 0.8;
  double ki = 0.1;
  double saturation = 2.0;
  double measurementNoise = 0.05;
  // per-block AR(1) disturbance, stationary standard deviation disturbanceSd;
  // coefficients cycle over blocks
  std::vector<double> disturbancePhi = {0.6, 0.3};
  double disturbanceSd = 0.2;
  double setpointStep = 1.0;
  // fault load on block 1: -faultLoad + faultOscillation sin(2 pi (n - changeAt) / faultPeriod)
  double faultLoad = 1.2;
  double faultOscillation = 0.6;
  double faultPeriod = 25.0;

  int change_index() const { return changeAt < 0 ? samples / 4 : changeAt; }
  void validate() const;
};

struct GroundTruth {
  Scenario scenario = Scenario::Normal;
  int changeAt = 0;
  int affectedBlock = -1;  // 0-based; -1 for normal
  std::vector<std::vector<int>> blockVariableMap;
  std::vector<int> noiseVariables;
  std::uint64_t seed = 0;
};

struct Simulation {
  RawDataset data;
  Mat plantOutput;  // N x blocks, noise-free y
  Mat setpoint;     // N x blocks
  GroundTruth truth;
};

Simulation simulate(const ScenarioConfig& cfg);

std::string ground_truth_json(const GroundTruth& truth, const std::vector<std::string>& names);

}  // namespace ssfamon
