#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssfamon/model_io.hpp"
#include "ssfamon/monitor.hpp"
#include "ssfamon/simgen.hpp"

namespace ssfamon::cli {

namespace {

namespace fs = std::filesystem;

std::string join(const std::vector<int>& v, const std::vector<std::string>& names) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += names.at(v[i]);
  }
  return s;
}

std::string rate_line(const std::array<double, 4>& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (int i = 0; i < 4; ++i) os << (i ? "  " : "") << kStatNames[i] << '=' << r[i];
  return os.str();
}

RunConfig config_or_default(const std::string& path) { return path.empty() ? RunConfig{} : load_config(path); }

nlohmann::json partition_json(const SubsetPartition& p, const std::vector<std::string>& names) {
  using nlohmann::json;
  json sdl = json::array();
  for (const auto& s : p.sdl) {
    json n = json::array();
    for (int v : s) n.push_back(names.at(v));
    sdl.push_back({{"indices", s}, {"names", n}});
  }
  json sdnlNames = json::array();
  for (int v : p.sdnl) sdnlNames.push_back(names.at(v));
  json trace = json::array();
  for (const auto& t : p.testTrace)
    trace.push_back({{"candidate", t.candidate}, {"p", std::isnan(t.p) ? json(nullptr) : json(t.p)}, {"accepted", t.accepted}});
  return {{"sdl", sdl}, {"sdnl", {{"indices", p.sdnl}, {"names", sdnlNames}}}, {"testTrace", trace}};
}

int cmd_fit(const std::string& train, const std::string& config, const std::string& modelOut, std::ostream& out) {
  RunConfig cfg = config_or_default(config);
  RawDataset data = load_csv(train);
  BuildDiagnostics diag;
  TwoLevelModel model = build_model(data, cfg, &diag);
  save_model(modelOut, model);
  out << "partition: " << model.subsets.size() << " S&DL subset(s)\n";
  for (size_t k = 0; k < model.subsets.size(); ++k)
    out << "  subset " << k + 1 << ": {" << join(model.subsets[k].variables, model.names) << "} M=" << model.subsets[k].sfa.M
        << "\n";
  out << "  S&DNL: {" << join(model.partition.sdnl, model.names) << "}\n";
  out << "global: " << model.global.ksfa.totalFeatures << " kernel slow features, M=" << model.global.ksfa.M << "\n";
  out << "training alarm rates\n";
  for (size_t k = 0; k < diag.subsetTrainingAlarmRates.size(); ++k)
    out << "  subset " << k + 1 << ": " << rate_line(diag.subsetTrainingAlarmRates[k]) << "\n";
  out << "  global: " << rate_line(diag.globalTrainingAlarmRates) << "\n";
  out << "model written to " << modelOut << "\n";
  return 0;
}

int cmd_partition(const std::string& train, const std::string& config, std::ostream& out) {
  RunConfig cfg = config_or_default(config);
  RawDataset data = load_csv(train);
  if (data.values.cols() < 2) throw DataError("partition needs at least 2 variables");
  Standardizer s = fit_standardizer(data);
  StandardizedMatrix Z = standardize(data, s);
  SubsetPartition p = partition_variables(Z, cfg.ssfa(), cfg.alpha);
  out << partition_json(p, data.names).dump(2) << "\n";
  return 0;
}

std::string limits_path(const std::string& report) { return report + ".limits.json"; }

int cmd_monitor(const std::string& modelPath, const std::string& testPath, const std::string& outPath, int w, int q,
                std::ostream& out) {
  TwoLevelModel model = load_model(modelPath);
  RawDataset test = load_csv(testPath);
  if (test.values.cols() != static_cast<Index>(model.names.size()))
    throw DataError("test data has " + std::to_string(test.values.cols()) + " variables, model expects " +
                    std::to_string(model.names.size()));
  if (w <= 0) w = model.config.policyWindow;
  if (q <= 0) q = model.config.clearWindow;
  MonitorReport rep = run_monitoring(model, test, w, q);
  {
    std::ofstream f(outPath);
    if (!f) throw DataError("cannot write report " + outPath);
    write_report_csv(f, rep);
  }
  {
    nlohmann::json lim;
    lim["policyWindow"] = w;
    lim["clearWindow"] = q;
    nlohmann::json subs = nlohmann::json::array();
    for (const auto& s : model.subsets) {
      nlohmann::json l;
      for (int i = 0; i < 4; ++i) l[kStatNames[i]] = s.limits[i].value;
      subs.push_back({{"variables", s.variables}, {"limits", l}});
    }
    lim["subsets"] = subs;
    for (int i = 0; i < 4; ++i) lim["global"][kStatNames[i]] = model.global.limits[i].value;
    std::ofstream f(limits_path(outPath));
    if (!f) throw DataError("cannot write " + limits_path(outPath));
    f << lim.dump(2) << "\n";
  }
  const auto& s = rep.summary;
  for (size_t k = 0; k < s.finalLocal.size(); ++k) out << "subset " << k + 1 << ": " << to_string(s.finalLocal[k]) << "\n";
  out << "global: " << to_string(s.finalGlobal) << "\n";
  if (!rep.verdicts.empty()) out << "context: " << rep.verdicts.back().localContext << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario, int samples, std::uint64_t seed, int changeAt, const std::string& outPath,
                 std::ostream& out) {
  ScenarioConfig cfg;
  cfg.scenario = parse_scenario(scenario);
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.changeAt = changeAt;
  Simulation sim = simulate(cfg);
  write_csv(outPath, sim.data);
  std::string truth = outPath + ".truth.json";
  std::ofstream f(truth);
  if (!f) throw DataError("cannot write " + truth);
  f << ground_truth_json(sim.truth, sim.data.names);
  out << "wrote " << samples << " samples to " << outPath << " and ground truth to " << truth << "\n";
  return 0;
}

const char* meaning(int stat) {
  switch (stat) {
    case kT2s:
      return "static deviation of the retained slow features (operating point moved)";
    case kT2f:
      return "static deviation of the residual features";
    case kD2s:
      return "abnormal temporal variation of the retained slow features (control action disturbed)";
    default:
      return "abnormal temporal variation of the residual features";
  }
}

int cmd_report(const std::string& reportPath, const std::string& outDir, std::ostream& out) {
  std::ifstream in(reportPath);
  if (!in) throw DataError("cannot open report " + reportPath);
  std::vector<ReportRow> rows = read_report_csv(in, reportPath);
  const size_t K = rows.front().subsetStats.size();

  std::vector<std::array<std::optional<double>, 4>> limits(K + 1);
  std::ifstream lf(limits_path(reportPath));
  if (lf) {
    try {
      auto lj = nlohmann::json::parse(lf);
      for (size_t k = 0; k <= K; ++k) {
        const auto& l = k < K ? lj.at("subsets").at(k).at("limits") : lj.at("global");
        for (int i = 0; i < 4; ++i) limits[k][i] = l.at(kStatNames[i]).get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed limits file " + limits_path(reportPath) + ": " + e.what());
    }
  }

  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) throw DataError("cannot create " + outDir + ": " + ec.message());

  std::ostringstream summary;
  summary << "report: " << reportPath << " (" << rows.size() << " samples)\n";
  for (size_t k = 0; k <= K; ++k) {
    std::string level = k < K ? "subset" + std::to_string(k + 1) : "global";
    summary << level << ":\n";
    for (int i = 0; i < 4; ++i) {
      std::string file = (fs::path(outDir) / (level + "_" + kStatNames[i] + ".csv")).string();
      std::ofstream f(file);
      if (!f) throw DataError("cannot write " + file);
      f << std::setprecision(17) << "index,value,limit,alarm\n";
      long first = -1;
      long alarms = 0, defined = 0;
      for (const auto& r : rows) {
        const auto& v = k < K ? r.subsetStats[k][i] : r.globalStats[i];
        f << r.index << ',';
        if (v) f << *v;
        f << ',';
        if (limits[k][i]) f << *limits[k][i];
        f << ',';
        if (v && limits[k][i]) {
          bool a = *v > *limits[k][i];
          f << (a ? 1 : 0);
          ++defined;
          alarms += a;
          if (a && first < 0) first = r.index;
        }
        f << '\n';
      }
      summary << "  " << kStatNames[i] << ": first alarm ";
      if (!limits[k][i])
        summary << "n/a (no limits file)";
      else if (first < 0)
        summary << "none";
      else
        summary << first;
      if (defined > 0)
        summary << ", alarm rate " << std::fixed << std::setprecision(3)
                << static_cast<double>(alarms) / static_cast<double>(defined) << std::defaultfloat;
      summary << "; " << meaning(i) << "\n";
    }
    {
      long firstT = -1, firstD = -1;
      for (const auto& r : rows) {
        bool t = k < K ? r.subsetT[k] : r.globalT;
        auto d = k < K ? r.subsetD[k] : r.globalD;
        if (t && firstT < 0) firstT = r.index;
        if (d.value_or(false) && firstD < 0) firstD = r.index;
      }
      summary << "  first T-group alarm " << firstT << ", first D-group alarm " << firstD << "\n";
    }
    Status fin = k < K ? rows.back().localStatus[k] : rows.back().globalStatus;
    summary << "  final status: " << to_string(fin) << "\n";
  }
  summary << "global: " << to_string(rows.back().globalStatus) << "\n";
  std::string text = summary.str();
  std::ofstream sf((fs::path(outDir) / "summary.txt").string());
  if (!sf) throw DataError("cannot write summary in " + outDir);
  sf << text;
  out << text;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse slow feature analysis based two-level process monitoring"};
  app.require_subcommand(1);

  std::string train, config, modelOut, modelPath, testPath, outPath, scenario, reportPath, outDir;
  int policyWindow = 0, clearWindow = 0, samples = 0, changeAt = -1;
  std::uint64_t seed = 0;

  auto* fit = app.add_subcommand("fit", "Build a two-level model from normal training data");
  fit->add_option("--train", train, "Training CSV")->required();
  fit->add_option("--config", config, "Config file (key = value)");
  fit->add_option("--model-out", modelOut, "Model JSON output")->required();

  auto* part = app.add_subcommand("partition", "Print the variable subset partition as JSON");
  part->add_option("--train", train, "Training CSV")->required();
  part->add_option("--config", config, "Config file (key = value)");

  auto* mon = app.add_subcommand("monitor", "Monitor test data with a fitted model");
  mon->add_option("--model", modelPath, "Model JSON")->required();
  mon->add_option("--test", testPath, "Test CSV")->required();
  mon->add_option("--out", outPath, "Report CSV output")->required();
  mon->add_option("--policy-window", policyWindow, "Persistence window w")->check(CLI::PositiveNumber);
  mon->add_option("--clear-window", clearWindow, "Clearing window q")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic closed-loop dataset");
  sim->add_option("--scenario", scenario, "normal, setpoint or fault")
      ->required()
      ->check(CLI::IsMember({"normal", "setpoint", "fault"}));
  sim->add_option("--samples", samples, "Number of samples (>= 200)")->required()->check(CLI::Range(200, 100000000));
  sim->add_option("--seed", seed, "Random seed")->required();
  sim->add_option("--change-at", changeAt, "Event onset sample (default samples/4)");
  sim->add_option("--out", outPath, "Output CSV")->required();

  auto* rep = app.add_subcommand("report", "Write plot-ready statistic series and a summary");
  rep->add_option("--monitor", reportPath, "Report CSV from the monitor command")->required();
  rep->add_option("--out-dir", outDir, "Output directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*fit) return cmd_fit(train, config, modelOut, out);
    if (*part) return cmd_partition(train, config, out);
    if (*mon) return cmd_monitor(modelPath, testPath, outPath, policyWindow, clearWindow, out);
    if (*sim) return cmd_simulate(scenario, samples, seed, changeAt, outPath, out);
    if (*rep) return cmd_report(reportPath, outDir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace ssfamon::cli
