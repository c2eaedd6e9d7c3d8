#include "ssfamon/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ssfamon {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("config key '" + key + "': not a number: " + v);
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("config key '" + key + "': not an integer: " + v);
  return out;
}

struct GammaSpec {
  std::optional<double> value;
  double scale = 1.0;
};

GammaSpec parse_gamma(const std::string& s) {
  GammaSpec g;
  if (s == "median") return g;
  const std::string pre = "median*";
  if (s.rfind(pre, 0) == 0) {
    g.scale = to_double("kernelGamma", s.substr(pre.size()));
    if (!(g.scale > 0)) throw UsageError("kernelGamma scale must be > 0");
    return g;
  }
  g.value = to_double("kernelGamma", s);
  if (!(*g.value > 0)) throw UsageError("kernelGamma must be > 0");
  return g;
}

}  // namespace

void RunConfig::validate() const {
  if (!(lambda >= 0)) throw UsageError("lambda must be >= 0");
  if (maxSupport < 0) throw UsageError("maxSupport must be >= 0");
  if (!(alpha > 0 && alpha < 1)) throw UsageError("alpha must be in (0, 1)");
  if (!(limitAlpha > 0.5 && limitAlpha < 1)) throw UsageError("limitAlpha must be in (0.5, 1)");
  parse_gamma(kernelGamma);
  if (policyWindow < 1) throw UsageError("policyWindow must be >= 1");
  if (clearWindow < 1) throw UsageError("clearWindow must be >= 1");
  if (maxIter < 1) throw UsageError("maxIter must be >= 1");
  if (!(tol > 0)) throw UsageError("tol must be > 0");
}

SsfaConfig RunConfig::ssfa() const {
  SsfaConfig c;
  c.lambda = lambda;
  c.lambda1Rule = lambda1Rule;
  c.maxIter = maxIter;
  c.tol = tol;
  c.maxSupport = maxSupport;
  return c;
}

KsfaConfig RunConfig::ksfa() const {
  GammaSpec g = parse_gamma(kernelGamma);
  KsfaConfig c;
  c.gamma = g.value;
  c.gammaScale = g.scale;
  return c;
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"lambda", [&](const std::string& v) { cfg.lambda = to_double("lambda", v); }},
      {"lambda1Rule", [&](const std::string& v) { cfg.lambda1Rule = Lambda1Rule::parse(v); }},
      {"maxSupport", [&](const std::string& v) { cfg.maxSupport = static_cast<int>(to_int("maxSupport", v)); }},
      {"alpha", [&](const std::string& v) { cfg.alpha = to_double("alpha", v); }},
      {"limitAlpha", [&](const std::string& v) { cfg.limitAlpha = to_double("limitAlpha", v); }},
      {"kernelGamma", [&](const std::string& v) { cfg.kernelGamma = v; }},
      {"policyWindow", [&](const std::string& v) { cfg.policyWindow = static_cast<int>(to_int("policyWindow", v)); }},
      {"clearWindow", [&](const std::string& v) { cfg.clearWindow = static_cast<int>(to_int("clearWindow", v)); }},
      {"maxIter", [&](const std::string& v) { cfg.maxIter = static_cast<int>(to_int("maxIter", v)); }},
      {"tol", [&](const std::string& v) { cfg.tol = to_double("tol", v); }},
      {"seed", [&](const std::string& v) {
         long long s = to_int("seed", v);
         if (s < 0) throw UsageError("seed must be >= 0");
         cfg.seed = static_cast<std::uint64_t>(s);
       }},
  };
  std::set<std::string> seen;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(origin + ":" + std::to_string(lineNo) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw UsageError(origin + ":" + std::to_string(lineNo) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw UsageError(origin + ":" + std::to_string(lineNo) + ": duplicate key '" + key + "'");
    it->second(val);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  return parse_config(in, path);
}

void write_config(std::ostream& out, const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda = " << c.lambda << '\n'
     << "lambda1Rule = " << c.lambda1Rule.to_string() << '\n'
     << "maxSupport = " << c.maxSupport << '\n'
     << "alpha = " << c.alpha << '\n'
     << "limitAlpha = " << c.limitAlpha << '\n'
     << "kernelGamma = " << c.kernelGamma << '\n'
     << "policyWindow = " << c.policyWindow << '\n'
     << "clearWindow = " << c.clearWindow << '\n'
     << "maxIter = " << c.maxIter << '\n'
     << "tol = " << c.tol << '\n'
     << "seed = " << c.seed << '\n';
  out << os.str();
}

}  // namespace ssfamon
