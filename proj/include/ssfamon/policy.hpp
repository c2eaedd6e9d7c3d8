#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace ssfamon {

enum class Status { Normal, ConditionChange, Fault, Transient };

std::string to_string(Status s);
Status parse_status(const std::string& s);

// Sliding-window verdict policy for one level (or one subset).
//   T-alarming: at least ceil(w/2) T flags among the last w samples; D-alarming likewise.
//   An alarm episode is a run of T-alarming samples. D counts as seen in the episode
//   if any raw D flag occurred from w samples before its start onward.
//   D-cleared: D seen in the episode and no D-alarming sample among the last q.
//   fault = T and D alarming; condition-change = T alarming and D cleared;
//   transient = T alarming otherwise; normal = T not alarming.
class PolicyTracker {
public:
  PolicyTracker(int window, int clearWindow);
  Status push(bool tFlag, std::optional<bool> dFlag);
  bool t_alarming() const { return tAlarming_; }
  bool d_alarming() const { return dAlarming_; }

private:
  int w_, q_;
  long n_ = 0;
  std::deque<char> t_, d_, dA_;
  int tCount_ = 0, dCount_ = 0, dACount_ = 0;
  bool tAlarming_ = false, dAlarming_ = false;
  bool inEpisode_ = false, dSeen_ = false;
};

std::vector<Status> classify_series(const std::vector<bool>& t, const std::vector<std::optional<bool>>& d, int window,
                                    int clearWindow);

// Status at the last sample of the series.
Status classify_status(const std::vector<bool>& t, const std::vector<std::optional<bool>>& d, int window,
                       int clearWindow);

}  // namespace ssfamon
