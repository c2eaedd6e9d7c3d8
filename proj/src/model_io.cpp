#include "ssfamon/model_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace ssfamon {

using nlohmann::json;

namespace {

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Mat json_mat(const json& j) {
  Index r = j.at("rows").get<Index>(), c = j.at("cols").get<Index>();
  const json& d = j.at("data");
  if (static_cast<Index>(d.size()) != r) throw DataError("matrix row count mismatch");
  Mat m(r, c);
  for (Index i = 0; i < r; ++i) {
    if (static_cast<Index>(d[i].size()) != c) throw DataError("matrix column count mismatch");
    for (Index k = 0; k < c; ++k) m(i, k) = d[i][k].get<double>();
  }
  return m;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec json_vec(const json& a) {
  Vec v(static_cast<Index>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
  return v;
}

json limits_json(const LimitSet& l) {
  json a = json::array();
  for (int i = 0; i < 4; ++i)
    a.push_back({{"statistic", kStatNames[i]}, {"value", l[i].value}, {"alpha", l[i].alpha}, {"bandwidth", l[i].bandwidth}});
  return a;
}

LimitSet json_limits(const json& a) {
  if (a.size() != 4) throw DataError("expected 4 control limits");
  LimitSet l;
  for (int i = 0; i < 4; ++i) {
    l[i].value = a[i].at("value").get<double>();
    l[i].alpha = a[i].at("alpha").get<double>();
    l[i].bandwidth = a[i].at("bandwidth").get<double>();
  }
  return l;
}

json config_json(const RunConfig& c) {
  return {{"lambda", c.lambda},         {"lambda1Rule", c.lambda1Rule.to_string()},
          {"maxSupport", c.maxSupport}, {"alpha", c.alpha},
          {"limitAlpha", c.limitAlpha}, {"kernelGamma", c.kernelGamma},
          {"policyWindow", c.policyWindow}, {"clearWindow", c.clearWindow},
          {"maxIter", c.maxIter},       {"tol", c.tol},
          {"seed", c.seed}};
}

RunConfig json_config(const json& j) {
  RunConfig c;
  c.lambda = j.at("lambda").get<double>();
  c.lambda1Rule = Lambda1Rule::parse(j.at("lambda1Rule").get<std::string>());
  c.maxSupport = j.at("maxSupport").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.limitAlpha = j.at("limitAlpha").get<double>();
  c.kernelGamma = j.at("kernelGamma").get<std::string>();
  c.policyWindow = j.at("policyWindow").get<int>();
  c.clearWindow = j.at("clearWindow").get<int>();
  c.maxIter = j.at("maxIter").get<int>();
  c.tol = j.at("tol").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void write_model(std::ostream& out, const TwoLevelModel& m) {
  json doc;
  doc["version"] = kModelVersion;
  doc["standardizer"] = {{"names", m.names}, {"mean", vec_json(m.standardizer.mean)}, {"std", vec_json(m.standardizer.std)}};

  json trace = json::array();
  for (const auto& t : m.partition.testTrace) {
    json p = std::isnan(t.p) ? json(nullptr) : json(t.p);
    trace.push_back({{"candidate", t.candidate}, {"p", p}, {"accepted", t.accepted}});
  }
  doc["partition"] = {{"sdl", m.partition.sdl}, {"sdnl", m.partition.sdnl}, {"testTrace", trace}};

  json subsets = json::array();
  json subsetLimits = json::array();
  for (const auto& s : m.subsets) {
    subsets.push_back({{"variables", s.variables},
                       {"W", mat_json(s.sfa.W)},
                       {"slowness", vec_json(s.sfa.slowness)},
                       {"eigenvalues", vec_json(s.sfa.eigenvalues)},
                       {"M", s.sfa.M},
                       {"omegaDotS", mat_json(s.sfa.omegaDotS)},
                       {"omegaDotF", mat_json(s.sfa.omegaDotF)}});
    subsetLimits.push_back(limits_json(s.limits));
  }
  doc["subsets"] = subsets;

  const KsfaModel& k = m.global.ksfa;
  doc["global"] = {{"kernel", {{"type", "radial-basis"}, {"gamma", k.gamma}}},
                   {"trainSupers", mat_json(k.trainSupers)},
                   {"colMean", vec_json(k.colMean)},
                   {"totalMean", k.totalMean},
                   {"alphas", mat_json(k.alphas)},
                   {"M", k.M},
                   {"totalFeatures", k.totalFeatures},
                   {"slowness", vec_json(k.slowness)},
                   {"threshold", k.threshold},
                   {"omegaDotS", mat_json(k.omegaDotS)},
                   {"omegaDotF", mat_json(k.omegaDotF)},
                   {"ridge", k.ridge}};
  doc["limits"] = {{"subsets", subsetLimits}, {"global", limits_json(m.global.limits)}};
  doc["config"] = config_json(m.config);
  out << doc.dump(1) << '\n';
}

void save_model(const std::string& path, const TwoLevelModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model " + path);
  write_model(out, model);
  if (!out) throw DataError("failed writing model " + path);
}

TwoLevelModel read_model(std::istream& in, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(origin + ": invalid JSON: " + e.what());
  }
  try {
    if (!doc.contains("version") || !doc["version"].is_string() || doc["version"].get<std::string>() != kModelVersion)
      throw DataError(origin + ": unsupported model version");
    TwoLevelModel m;
    const json& s = doc.at("standardizer");
    m.names = s.at("names").get<std::vector<std::string>>();
    m.standardizer.mean = json_vec(s.at("mean"));
    m.standardizer.std = json_vec(s.at("std"));

    const json& p = doc.at("partition");
    m.partition.sdl = p.at("sdl").get<std::vector<std::vector<int>>>();
    m.partition.sdnl = p.at("sdnl").get<std::vector<int>>();
    for (const auto& t : p.at("testTrace")) {
      TestRecord r;
      r.candidate = t.at("candidate").get<std::vector<int>>();
      r.p = t.at("p").is_null() ? std::numeric_limits<double>::quiet_NaN() : t.at("p").get<double>();
      r.accepted = t.at("accepted").get<bool>();
      m.partition.testTrace.push_back(r);
    }

    const json& lim = doc.at("limits");
    const json& subs = doc.at("subsets");
    if (subs.size() != m.partition.sdl.size() || lim.at("subsets").size() != subs.size())
      throw DataError(origin + ": subset count does not match partition");
    for (size_t i = 0; i < subs.size(); ++i) {
      const json& j = subs[i];
      SubsetModel sm;
      sm.variables = j.at("variables").get<std::vector<int>>();
      sm.sfa.W = json_mat(j.at("W"));
      sm.sfa.slowness = json_vec(j.at("slowness"));
      sm.sfa.eigenvalues = json_vec(j.at("eigenvalues"));
      sm.sfa.M = j.at("M").get<int>();
      sm.sfa.omegaDotS = json_mat(j.at("omegaDotS"));
      sm.sfa.omegaDotF = json_mat(j.at("omegaDotF"));
      sm.limits = json_limits(lim.at("subsets")[i]);
      m.subsets.push_back(std::move(sm));
    }

    const json& g = doc.at("global");
    KsfaModel& k = m.global.ksfa;
    k.gamma = g.at("kernel").at("gamma").get<double>();
    k.trainSupers = json_mat(g.at("trainSupers"));
    k.colMean = json_vec(g.at("colMean"));
    k.totalMean = g.at("totalMean").get<double>();
    k.alphas = json_mat(g.at("alphas"));
    k.M = g.at("M").get<int>();
    k.totalFeatures = g.at("totalFeatures").get<int>();
    k.slowness = json_vec(g.at("slowness"));
    k.threshold = g.at("threshold").get<double>();
    k.omegaDotS = json_mat(g.at("omegaDotS"));
    k.omegaDotF = json_mat(g.at("omegaDotF"));
    k.ridge = g.at("ridge").get<double>();
    m.global.limits = json_limits(lim.at("global"));
    m.config = json_config(doc.at("config"));
    return m;
  } catch (const json::exception& e) {
    throw DataError(origin + ": malformed model: " + e.what());
  }
}

TwoLevelModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model " + path);
  return read_model(in, path);
}

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}
void put(std::ostream& out, const std::optional<bool>& v) {
  if (v) out << (*v ? 1 : 0);
}

}  // namespace

void write_report_csv(std::ostream& out, const MonitorReport& rep) {
  const size_t K = rep.verdicts.empty() ? 0 : rep.verdicts.front().perSubset.size();
  out << "index";
  for (size_t k = 1; k <= K; ++k)
    for (const char* c : {"T2s_", "T2f_", "D2s_", "D2f_", "a_T_", "a_D_"}) out << ',' << c << k;
  for (const char* c : {"T2s_g", "T2f_g", "D2s_g", "D2f_g", "a_T_g", "a_D_g"}) out << ',' << c;
  for (size_t k = 1; k <= K; ++k) out << ",localStatus_" << k;
  out << ",globalStatus\n";
  out << std::setprecision(17);
  auto level = [&](const LevelResult& lr) {
    out << ',' << lr.stats.T2s << ',' << lr.stats.T2f << ',';
    put(out, lr.stats.D2s);
    out << ',';
    put(out, lr.stats.D2f);
    out << ',' << (lr.tFlag() ? 1 : 0) << ',';
    put(out, lr.dFlag());
  };
  for (const auto& v : rep.verdicts) {
    out << v.index;
    for (const auto& lr : v.perSubset) level(lr);
    level(v.global);
    for (Status s : v.localStatus) out << ',' << to_string(s);
    out << ',' << to_string(v.globalStatus) << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw DataError(origin + ": empty report");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  };
  auto head = split(line);
  if (head.empty() || head[0] != "index" || head.back() != "globalStatus") throw DataError(origin + ": not a report file");
  // 1 + 6K + 6 + K + 1 columns
  if ((head.size() - 8) % 7 != 0) throw DataError(origin + ": unexpected report column count");
  const size_t K = (head.size() - 8) / 7;
  auto num = [&](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    try {
      size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw DataError(origin + ": bad number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw DataError(origin + ": bad number '" + s + "'");
    }
  };
  auto flag = [&](const std::string& s) -> std::optional<bool> {
    if (s.empty()) return std::nullopt;
    if (s == "1") return true;
    if (s == "0") return false;
    throw DataError(origin + ": bad alarm flag '" + s + "'");
  };
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto c = split(line);
    if (c.size() != head.size()) throw DataError(origin + ": ragged report row");
    ReportRow r;
    auto idx = num(c[0]);
    if (!idx) throw DataError(origin + ": missing index");
    r.index = static_cast<long>(*idx);
    size_t p = 1;
    auto level = [&](std::array<std::optional<double>, 4>& st, bool& t, std::optional<bool>& d) {
      for (int i = 0; i < 4; ++i) st[i] = num(c[p++]);
      auto tf = flag(c[p++]);
      t = tf.value_or(false);
      d = flag(c[p++]);
    };
    r.subsetStats.resize(K);
    r.subsetT.resize(K);
    r.subsetD.resize(K);
    for (size_t k = 0; k < K; ++k) {
      bool t;
      level(r.subsetStats[k], t, r.subsetD[k]);
      r.subsetT[k] = t;
    }
    level(r.globalStats, r.globalT, r.globalD);
    for (size_t k = 0; k < K; ++k) r.localStatus.push_back(parse_status(c[p++]));
    r.globalStatus = parse_status(c[p++]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError(origin + ": report has no rows");
  return rows;
}

}  // namespace ssfamon
