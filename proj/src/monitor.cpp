#include "ssfamon/monitor.hpp"

#include <limits>

namespace ssfamon {

std::vector<SfaModel> TwoLevelModel::sfa_models() const {
  std::vector<SfaModel> out;
  out.reserve(subsets.size());
  for (const auto& s : subsets) out.push_back(s.sfa);
  return out;
}

std::optional<bool> LevelResult::dFlag(bool includeD2f) const {
  const auto& s = alarms[kD2s];
  const auto& f = alarms[kD2f];
  if (!s && (!f || !includeD2f)) return std::nullopt;
  return s.value_or(false) || (includeD2f && f.value_or(false));
}

namespace {

std::array<std::optional<double>, 4> as_array(const Statistics& s) {
  return {s.T2s, s.T2f, s.D2s, s.D2f};
}

LevelResult evaluate_level(const Statistics& st, const LimitSet& lim) {
  LevelResult r;
  r.stats = st;
  auto v = as_array(st);
  for (int i = 0; i < 4; ++i) r.alarms[i] = evaluate(v[i], lim[i]);
  return r;
}

LimitSet fit_limits(const std::vector<Statistics>& series, double alpha) {
  std::array<std::vector<double>, 4> vals;
  for (const auto& s : series) {
    auto v = as_array(s);
    for (int i = 0; i < 4; ++i)
      if (v[i]) vals[i].push_back(*v[i]);
  }
  LimitSet out;
  for (int i = 0; i < 4; ++i) out[i] = kde_limit(vals[i], alpha);
  return out;
}

std::array<double, 4> alarm_rates(const std::vector<Statistics>& series, const LimitSet& lim) {
  std::array<double, 4> hits{}, count{};
  for (const auto& s : series) {
    auto v = as_array(s);
    for (int i = 0; i < 4; ++i)
      if (v[i]) {
        count[i] += 1;
        hits[i] += *v[i] > lim[i].value;
      }
  }
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = count[i] > 0 ? hits[i] / count[i] : 0.0;
  return out;
}

}  // namespace

LevelSeries replay_statistics(const TwoLevelModel& model, const Mat& Z) {
  const Index N = Z.rows();
  LevelSeries out;
  out.perSubset.resize(model.subsets.size());
  std::vector<SfaModel> sfas = model.sfa_models();
  Mat supers = build_super_samples(model.partition, sfas, Z);
  std::optional<Vec> prevFeat;
  for (Index n = 0; n < N; ++n) {
    for (size_t k = 0; k < model.subsets.size(); ++k) {
      const auto& sm = model.subsets[k];
      Vec x = select_entries(Z.row(n).transpose(), sm.variables);
      std::optional<Vec> xp;
      if (n > 0) xp = select_entries(Z.row(n - 1).transpose(), sm.variables);
      auto [sys, res] = project(sm.sfa, x, xp);
      out.perSubset[k].push_back(statistics(sm.sfa, sys, res));
    }
    Vec f = ksfa_features(model.global.ksfa, supers.row(n).transpose());
    auto [sys, res] = split_super_features(model.global.ksfa, f, prevFeat);
    out.global.push_back(statistics_super(model.global.ksfa, sys, res));
    prevFeat = f;
  }
  return out;
}

TwoLevelModel build_model(const RawDataset& train, const RunConfig& cfg, BuildDiagnostics* diag) {
  cfg.validate();
  const Index N = train.values.rows();
  const Index J = train.values.cols();
  if (J < 1) throw DataError("training data has no variables");
  if (N <= J) throw DataError("training data needs more samples than variables (N=" + std::to_string(N) +
                              ", J=" + std::to_string(J) + ")");
  if (N < 30) throw DataError("training data needs at least 30 samples");

  TwoLevelModel model;
  model.config = cfg;
  model.names = train.names;
  model.standardizer = fit_standardizer(train);
  StandardizedMatrix Z = standardize(train, model.standardizer);

  if (J == 1) {
    model.partition.sdl = {{0}};
    model.partition.testTrace.push_back({{0}, std::numeric_limits<double>::quiet_NaN(), true});
  } else {
    model.partition = partition_variables(Z, cfg.ssfa(), cfg.alpha);
  }

  for (const auto& vars : model.partition.sdl) {
    SubsetModel sm;
    sm.variables = vars;
    sm.sfa = fit_sfa({select_columns(Z.X, vars), select_columns(Z.Xdot, vars)});
    model.subsets.push_back(std::move(sm));
  }
  Mat supers = build_super_samples(model.partition, model.sfa_models(), Z.X);
  model.global.ksfa = fit_ksfa(supers, cfg.ksfa());

  LevelSeries series = replay_statistics(model, Z.X);
  for (size_t k = 0; k < model.subsets.size(); ++k)
    model.subsets[k].limits = fit_limits(series.perSubset[k], cfg.limitAlpha);
  model.global.limits = fit_limits(series.global, cfg.limitAlpha);

  if (diag) {
    diag->subsetTrainingAlarmRates.clear();
    for (size_t k = 0; k < model.subsets.size(); ++k)
      diag->subsetTrainingAlarmRates.push_back(alarm_rates(series.perSubset[k], model.subsets[k].limits));
    diag->globalTrainingAlarmRates = alarm_rates(series.global, model.global.limits);
  }
  return model;
}

MonitorSession::MonitorSession(const TwoLevelModel& model, int policyWindow, int clearWindow, bool includeD2f)
    : model_(model), includeD2f_(includeD2f), global_(policyWindow, clearWindow) {
  for (size_t k = 0; k < model.subsets.size(); ++k) local_.emplace_back(policyWindow, clearWindow);
}

SampleVerdict MonitorSession::step(const Vec& raw) {
  const auto& std_ = model_.standardizer;
  if (raw.size() != std_.mean.size())
    throw DataError("sample has " + std::to_string(raw.size()) + " variables, model expects " +
                    std::to_string(std_.mean.size()));
  Vec x = (raw - std_.mean).cwiseQuotient(std_.std);

  SampleVerdict v;
  v.index = index_;
  Index width = static_cast<Index>(model_.partition.sdnl.size());
  for (const auto& sm : model_.subsets) width += sm.sfa.M;
  Vec xsp(width);
  Index col = 0;
  bool anyLocal = false;
  for (size_t k = 0; k < model_.subsets.size(); ++k) {
    const auto& sm = model_.subsets[k];
    Vec xs = select_entries(x, sm.variables);
    std::optional<Vec> xp;
    if (prevX_) xp = select_entries(*prevX_, sm.variables);
    auto [sys, res] = project(sm.sfa, xs, xp);
    xsp.segment(col, sm.sfa.M) = sys.s;
    col += sm.sfa.M;
    LevelResult lr = evaluate_level(statistics(sm.sfa, sys, res), sm.limits);
    Status st = local_[k].push(lr.tFlag(), lr.dFlag(includeD2f_));
    anyLocal = anyLocal || st != Status::Normal;
    v.perSubset.push_back(lr);
    v.localStatus.push_back(st);
  }
  for (int var : model_.partition.sdnl) xsp(col++) = x(var);

  const auto& ks = model_.global.ksfa;
  Vec f = ksfa_features(ks, xsp);
  auto [sys, res] = split_super_features(ks, f, prevGlobalFeatures_);
  v.global = evaluate_level(statistics_super(ks, sys, res), model_.global.limits);
  v.globalStatus = global_.push(v.global.tFlag(), v.global.dFlag(includeD2f_));
  v.localContext = anyLocal ? "local-affected" : "local-unaffected";

  prevX_ = x;
  prevGlobalFeatures_ = f;
  ++index_;
  return v;
}

ReportSummary summarize(const std::vector<SampleVerdict>& verdicts) {
  ReportSummary s;
  if (verdicts.empty()) return s;
  const size_t K = verdicts.front().perSubset.size();
  s.subsetAlarmRates.assign(K, {});
  s.subsetFirstAlarm.assign(K, {-1, -1, -1, -1});
  std::vector<std::array<double, 4>> cnt(K + 1), hit(K + 1);
  for (const auto& v : verdicts) {
    for (size_t k = 0; k <= K; ++k) {
      const LevelResult& lr = k < K ? v.perSubset[k] : v.global;
      auto& first = k < K ? s.subsetFirstAlarm[k] : s.globalFirstAlarm;
      for (int i = 0; i < 4; ++i) {
        if (!lr.alarms[i]) continue;
        cnt[k][i] += 1;
        if (*lr.alarms[i]) {
          hit[k][i] += 1;
          if (first[i] < 0) first[i] = v.index;
        }
      }
    }
  }
  for (size_t k = 0; k <= K; ++k) {
    auto& rate = k < K ? s.subsetAlarmRates[k] : s.globalAlarmRates;
    for (int i = 0; i < 4; ++i) rate[i] = cnt[k][i] > 0 ? hit[k][i] / cnt[k][i] : 0.0;
  }
  s.finalLocal = verdicts.back().localStatus;
  s.finalGlobal = verdicts.back().globalStatus;
  return s;
}

MonitorReport run_monitoring(const TwoLevelModel& model, const RawDataset& test, int policyWindow, int clearWindow,
                             bool includeD2f) {
  if (test.values.cols() != model.standardizer.mean.size())
    throw DataError("test data has " + std::to_string(test.values.cols()) + " variables, model expects " +
                    std::to_string(model.standardizer.mean.size()));
  MonitorSession session(model, policyWindow, clearWindow, includeD2f);
  MonitorReport rep;
  rep.verdicts.reserve(static_cast<size_t>(test.values.rows()));
  for (Index n = 0; n < test.values.rows(); ++n) rep.verdicts.push_back(session.step(test.values.row(n).transpose()));
  rep.summary = summarize(rep.verdicts);
  return rep;
}

}  // namespace ssfamon
