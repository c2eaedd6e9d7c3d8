#include "ssfamon/policy.hpp"

#include <stdexcept>

#include "ssfamon/common.hpp"

namespace ssfamon {

std::string to_string(Status s) {
  switch (s) {
    case Status::Normal:
      return "normal";
    case Status::ConditionChange:
      return "condition-change";
    case Status::Fault:
      return "fault";
    case Status::Transient:
      return "transient";
  }
  return "normal";
}

Status parse_status(const std::string& s) {
  if (s == "normal") return Status::Normal;
  if (s == "condition-change") return Status::ConditionChange;
  if (s == "fault") return Status::Fault;
  if (s == "transient") return Status::Transient;
  throw DataError("unknown status '" + s + "'");
}

PolicyTracker::PolicyTracker(int window, int clearWindow) : w_(window), q_(clearWindow) {
  if (w_ < 1 || q_ < 1) throw UsageError("policy windows must be >= 1");
}

Status PolicyTracker::push(bool tFlag, std::optional<bool> dFlag) {
  const int need = (w_ + 1) / 2;
  const bool dRaw = dFlag.value_or(false);

  t_.push_back(tFlag);
  tCount_ += tFlag;
  if (static_cast<int>(t_.size()) > w_) {
    tCount_ -= t_.front();
    t_.pop_front();
  }
  // raw D flags are kept for w+1 samples: w for the vote, one more for the episode look-back
  d_.push_back(dRaw);
  if (static_cast<int>(d_.size()) > w_ + 1) d_.pop_front();
  dCount_ = 0;
  for (size_t i = d_.size() > static_cast<size_t>(w_) ? d_.size() - w_ : 0; i < d_.size(); ++i) dCount_ += d_[i];

  tAlarming_ = tCount_ >= need;
  dAlarming_ = dCount_ >= need;

  dA_.push_back(dAlarming_);
  dACount_ += dAlarming_;
  if (static_cast<int>(dA_.size()) > q_) {
    dACount_ -= dA_.front();
    dA_.pop_front();
  }

  if (tAlarming_) {
    if (!inEpisode_) {
      inEpisode_ = true;
      dSeen_ = false;
      for (char v : d_) dSeen_ = dSeen_ || v;
    } else {
      dSeen_ = dSeen_ || dRaw;
    }
  } else {
    inEpisode_ = false;
    dSeen_ = false;
  }
  ++n_;
  const bool cleared = dSeen_ && n_ >= q_ && dACount_ == 0;

  if (tAlarming_ && dAlarming_) return Status::Fault;
  if (tAlarming_ && cleared) return Status::ConditionChange;
  if (tAlarming_) return Status::Transient;
  return Status::Normal;
}

std::vector<Status> classify_series(const std::vector<bool>& t, const std::vector<std::optional<bool>>& d, int window,
                                    int clearWindow) {
  if (t.size() != d.size()) throw std::invalid_argument("T and D flag series differ in length");
  PolicyTracker tr(window, clearWindow);
  std::vector<Status> out;
  out.reserve(t.size());
  for (size_t i = 0; i < t.size(); ++i) out.push_back(tr.push(t[i], d[i]));
  return out;
}

Status classify_status(const std::vector<bool>& t, const std::vector<std::optional<bool>>& d, int window,
                       int clearWindow) {
  auto s = classify_series(t, d, window, clearWindow);
  return s.empty() ? Status::Normal : s.back();
}

}  // namespace ssfamon
