#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ssfamon/config.hpp"
#include "ssfamon/data.hpp"
#include "ssfamon/ksfa.hpp"
#include "ssfamon/limits.hpp"
#include "ssfamon/partition.hpp"
#include "ssfamon/policy.hpp"
#include "ssfamon/sfa.hpp"

namespace ssfamon {

// Order of the four statistics wherever they are stored as arrays.
enum StatIndex { kT2s = 0, kT2f = 1, kD2s = 2, kD2f = 3 };
inline constexpr std::array<const char*, 4> kStatNames = {"T2s", "T2f", "D2s", "D2f"};

using LimitSet = std::array<ControlLimit, 4>;

struct SubsetModel {
  std::vector<int> variables;
  SfaModel sfa;
  LimitSet limits;
};

struct GlobalModel {
  KsfaModel ksfa;
  LimitSet limits;
};

struct TwoLevelModel {
  std::vector<std::string> names;
  Standardizer standardizer;
  SubsetPartition partition;
  std::vector<SubsetModel> subsets;
  GlobalModel global;
  RunConfig config;

  std::vector<SfaModel> sfa_models() const;
};

struct LevelResult {
  Statistics stats;
  std::array<std::optional<bool>, 4> alarms;
  bool tFlag() const { return alarms[kT2s].value_or(false) || alarms[kT2f].value_or(false); }
  // D-group flag; absent when no D statistic is available.
  std::optional<bool> dFlag(bool includeD2f = true) const;
};

struct SampleVerdict {
  long index = 0;
  std::vector<LevelResult> perSubset;
  LevelResult global;
  std::vector<Status> localStatus;
  Status globalStatus = Status::Normal;
  std::string localContext;  // "local-affected" or "local-unaffected"
};

struct ReportSummary {
  std::vector<std::array<double, 4>> subsetAlarmRates;
  std::array<double, 4> globalAlarmRates{};
  std::vector<std::array<long, 4>> subsetFirstAlarm;  // -1 when never
  std::array<long, 4> globalFirstAlarm{-1, -1, -1, -1};
  std::vector<Status> finalLocal;
  Status finalGlobal = Status::Normal;
};

struct MonitorReport {
  std::vector<SampleVerdict> verdicts;
  ReportSummary summary;
};

struct BuildDiagnostics {
  std::vector<std::array<double, 4>> subsetTrainingAlarmRates;
  std::array<double, 4> globalTrainingAlarmRates{};
};

TwoLevelModel build_model(const RawDataset& train, const RunConfig& cfg, BuildDiagnostics* diag = nullptr);

// Statistics of every standardized training row, used for the control limits.
struct LevelSeries {
  std::vector<std::vector<Statistics>> perSubset;  // [subset][row]
  std::vector<Statistics> global;
};
LevelSeries replay_statistics(const TwoLevelModel& model, const Mat& standardized);

class MonitorSession {
public:
  MonitorSession(const TwoLevelModel& model, int policyWindow, int clearWindow, bool includeD2f = true);
  SampleVerdict step(const Vec& raw);

private:
  const TwoLevelModel& model_;
  bool includeD2f_;
  long index_ = 0;
  std::optional<Vec> prevX_;
  std::optional<Vec> prevGlobalFeatures_;
  std::vector<PolicyTracker> local_;
  PolicyTracker global_;
};

MonitorReport run_monitoring(const TwoLevelModel& model, const RawDataset& test, int policyWindow, int clearWindow,
                             bool includeD2f = true);

ReportSummary summarize(const std::vector<SampleVerdict>& verdicts);

}  // namespace ssfamon
