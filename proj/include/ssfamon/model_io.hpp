#pragma once

#include <iosfwd>
#include <string>

#include "ssfamon/monitor.hpp"

namespace ssfamon {

inline constexpr const char* kModelVersion = "1";

void write_model(std::ostream& out, const TwoLevelModel& model);
void save_model(const std::string& path, const TwoLevelModel& model);
TwoLevelModel read_model(std::istream& in, const std::string& origin = "<model>");
TwoLevelModel load_model(const std::string& path);

// Report CSV: index, per subset T2s_k,T2f_k,D2s_k,D2f_k,a_T_k,a_D_k, global T2s_g..a_D_g,
// localStatus_k..., globalStatus. Absent values are empty cells.
void write_report_csv(std::ostream& out, const MonitorReport& report);

struct ReportRow {
  long index = 0;
  std::vector<std::array<std::optional<double>, 4>> subsetStats;
  std::vector<bool> subsetT;
  std::vector<std::optional<bool>> subsetD;
  std::array<std::optional<double>, 4> globalStats;
  bool globalT = false;
  std::optional<bool> globalD;
  std::vector<Status> localStatus;
  Status globalStatus = Status::Normal;
};
std::vector<ReportRow> read_report_csv(std::istream& in, const std::string& origin = "<report>");

}  // namespace ssfamon
