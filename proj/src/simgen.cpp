#include "ssfamon/simgen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"

namespace ssfamon {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Normal:
      return "normal";
    case Scenario::Setpoint:
      return "setpoint";
    case Scenario::Fault:
      return "fault";
  }
  return "normal";
}

Scenario parse_scenario(const std::string& s) {
  if (s == "normal") return Scenario::Normal;
  if (s == "setpoint") return Scenario::Setpoint;
  if (s == "fault") return Scenario::Fault;
  throw UsageError("unknown scenario '" + s + "' (expected normal, setpoint or fault)");
}

void ScenarioConfig::validate() const {
  if (samples < 200) throw UsageError("scenario needs at least 200 samples");
  if (blocks < 1) throw UsageError("need at least one block");
  if (noiseVars < 0) throw UsageError("noiseVars must be >= 0");
  int c = change_index();
  if (c < 0 || c >= samples) throw UsageError("changeAt must be in [0, samples)");
  if (disturbancePhi.empty()) throw UsageError("disturbancePhi must not be empty");
  for (double p : disturbancePhi)
    if (!(std::abs(p) < 1)) throw UsageError("disturbance AR coefficients must satisfy |phi| < 1");
}

Simulation simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  const int N = cfg.samples;
  const int B = cfg.blocks;
  const int J = 4 * B + cfg.noiseVars;
  const int change = cfg.change_index();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Simulation sim;
  sim.data.values.resize(N, J);
  sim.plantOutput.resize(N, B);
  sim.setpoint.resize(N, B);
  for (int k = 0; k < B; ++k)
    for (const char* s : {"err", "y", "u", "z"}) sim.data.names.push_back("b" + std::to_string(k + 1) + "_" + s);
  for (int i = 0; i < cfg.noiseVars; ++i) sim.data.names.push_back("n" + std::to_string(i + 1));

  std::vector<double> y(B, 0.0), integ(B, 0.0), dist(B, 0.0);
  const double ms = cfg.measurementNoise;
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < B; ++k) {
      double r = (cfg.scenario == Scenario::Setpoint && k == 0 && n >= change) ? cfg.setpointStep : 0.0;
      double load = 0.0;
      if (cfg.scenario == Scenario::Fault && k == 0 && n >= change)
        load = -cfg.faultLoad + cfg.faultOscillation * std::sin(2.0 * std::numbers::pi * (n - change) / cfg.faultPeriod);
      double ym = y[k] + ms * gauss(rng);
      double e = r - ym;
      integ[k] += e;
      double u = cfg.kp * e + cfg.ki * integ[k];
      if (u > cfg.saturation) {
        u = cfg.saturation;
        integ[k] -= e;
      } else if (u < -cfg.saturation) {
        u = -cfg.saturation;
        integ[k] -= e;
      }
      sim.data.values(n, 4 * k + 0) = r - y[k] + ms * gauss(rng);
      sim.data.values(n, 4 * k + 1) = ym;
      sim.data.values(n, 4 * k + 2) = u + ms * gauss(rng);
      sim.data.values(n, 4 * k + 3) = 0.6 * y[k] + 0.4 * u + ms * gauss(rng);
      sim.plantOutput(n, k) = y[k];
      sim.setpoint(n, k) = r;
      double phi = cfg.disturbancePhi[static_cast<size_t>(k) % cfg.disturbancePhi.size()];
      dist[k] = phi * dist[k] + cfg.disturbanceSd * std::sqrt(1.0 - phi * phi) * gauss(rng);
      y[k] = cfg.a * y[k] + cfg.b * u + dist[k] + load;
    }
    for (int i = 0; i < cfg.noiseVars; ++i) sim.data.values(n, 4 * B + i) = gauss(rng);
  }

  GroundTruth& gt = sim.truth;
  gt.scenario = cfg.scenario;
  gt.changeAt = change;
  gt.affectedBlock = cfg.scenario == Scenario::Normal ? -1 : 0;
  gt.seed = cfg.seed;
  for (int k = 0; k < B; ++k) gt.blockVariableMap.push_back({4 * k, 4 * k + 1, 4 * k + 2, 4 * k + 3});
  for (int i = 0; i < cfg.noiseVars; ++i) gt.noiseVariables.push_back(4 * B + i);
  return sim;
}

std::string ground_truth_json(const GroundTruth& gt, const std::vector<std::string>& names) {
  nlohmann::json blocks = nlohmann::json::array();
  for (size_t k = 0; k < gt.blockVariableMap.size(); ++k) {
    nlohmann::json vars = nlohmann::json::array();
    for (int v : gt.blockVariableMap[k]) vars.push_back(names.at(v));
    blocks.push_back({{"block", k + 1}, {"indices", gt.blockVariableMap[k]}, {"variables", vars}});
  }
  nlohmann::json noise = nlohmann::json::array();
  for (int v : gt.noiseVariables) noise.push_back(names.at(v));
  nlohmann::json doc = {{"scenario", to_string(gt.scenario)},
                        {"changeAt", gt.changeAt},
                        {"affectedBlock", gt.affectedBlock < 0 ? nlohmann::json(nullptr) : nlohmann::json(gt.affectedBlock + 1)},
                        {"seed", gt.seed},
                        {"blockVariableMap", blocks},
                        {"noiseVariables", {{"indices", gt.noiseVariables}, {"variables", noise}}}};
  return doc.dump(2) + "\n";
}

}  // namespace ssfamon
