#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/orbit.hpp"
#include "chaoslab/scan/scan.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace chaoslab::scan {
namespace {

using nlohmann::json;

struct FamilyInfo {
  json defaults;
  std::vector<std::string> sweepable;
  std::vector<std::string> analyses;
};

const std::map<std::string, FamilyInfo>& families() {
  static const std::map<std::string, FamilyInfo> f = [] {
    std::map<std::string, FamilyInfo> out;
    out["blue_sky"] = {{{"g_amplitude", 0.0}, {"omega", 0.3}, {"dt", 1e-2}}, {"mu"}, {"periodic"}};
    const zoo::SolidTorusParams st;
    out["solenoid"] = {{{"m", st.m},
                        {"omega", st.omega},
                        {"g_amplitude", 0.0},
                        {"fiber_dim", st.fiber_dim},
                        {"fiber_radius", st.fiber_radius},
                        {"contraction", st.contraction},
                        {"offset", st.offset}},
                       {"contraction"},
                       {"verify"}};
    out["circle"] = {{{"m", 1}, {"g_amplitude", 0.0}, {"omega", 0.0}, {"iterations", 100000}}, {"omega"}, {"lyapunov"}};
    const zoo::GeomLorenzParams gl;
    out["lorenz"] = {{{"x1s", gl.x1s}, {"x2s", gl.x2s}, {"y1s", gl.y1s}, {"y2s", gl.y2s},
                      {"A1", gl.A1}, {"A2", gl.A2}, {"alpha", gl.alpha}, {"iterations", 20000}},
                     {"mu1", "mu2"},
                     {"lyapunov", "kneading", "verify"}};
    return out;
  }();
  return f;
}

double number(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path, "missing field '" + path + "'");
  if (!j[key].is_number()) throw ConfigError(path, "field '" + path + "' must be a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "field '" + path + "' must be finite");
  return v;
}

int integer_param(const json& params, const std::string& key) {
  const double v = params.at(key).get<double>();
  if (v != std::floor(v)) throw ConfigError("params." + key, "parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    v[i] = log ? std::exp(std::log(min) + u * (std::log(max) - std::log(min))) : min + u * (max - min);
  }
  if (n > 1) v.back() = max;
  return v;
}

ScanSpec parse_scan_spec(const json& j) {
  if (!j.is_object()) throw ConfigError("spec", "scan spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "family" && key != "params" && key != "sweep" && key != "analyses" && key != "seed")
      throw ConfigError(key, "unknown field '" + key + "'");
  ScanSpec spec;
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("family", "missing string field 'family'");
  spec.family = j["family"].get<std::string>();
  const auto it = families().find(spec.family);
  if (it == families().end()) {
    std::string names;
    for (const auto& [name, _] : families()) names += (names.empty() ? "" : ", ") + name;
    throw ConfigError("family", "unknown family '" + spec.family + "' (available: " + names + ")");
  }
  const FamilyInfo& info = it->second;

  spec.params = info.defaults;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("params", "'params' must be a JSON object");
    for (const auto& [key, value] : j["params"].items()) {
      if (!info.defaults.contains(key)) throw ConfigError("params." + key, "unknown parameter '" + key + "'");
      if (!value.is_number()) throw ConfigError("params." + key, "parameter '" + key + "' must be a number");
      spec.params[key] = value;
    }
  }

  if (!j.contains("sweep") || !j["sweep"].is_array() || j["sweep"].empty())
    throw ConfigError("sweep", "'sweep' must be a nonempty array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j["sweep"].size(); ++i) {
    const json& a = j["sweep"][i];
    const std::string path = "sweep[" + std::to_string(i) + "]";
    if (!a.is_object()) throw ConfigError(path, "'" + path + "' must be an object");
    SweepAxis axis;
    if (!a.contains("name") || !a["name"].is_string()) throw ConfigError(path + ".name", "missing sweep name");
    axis.name = a["name"].get<std::string>();
    if (std::find(info.sweepable.begin(), info.sweepable.end(), axis.name) == info.sweepable.end())
      throw ConfigError(path + ".name", "family '" + spec.family + "' has no sweepable parameter '" + axis.name + "'");
    if (!seen.insert(axis.name).second) throw ConfigError(path + ".name", "parameter '" + axis.name + "' swept twice");
    axis.min = number(a, "min", path + ".min");
    axis.max = number(a, "max", path + ".max");
    if (!a.contains("n") || !a["n"].is_number_integer()) throw ConfigError(path + ".n", "grid size must be an integer");
    axis.n = a["n"].get<int>();
    if (axis.n < 2) throw ConfigError(path + ".n", "grid size must be at least 2 (got " + std::to_string(axis.n) + ")");
    if (a.contains("scale")) {
      if (!a["scale"].is_string() || (a["scale"] != "linear" && a["scale"] != "log"))
        throw ConfigError(path + ".scale", "scale must be 'linear' or 'log'");
      axis.log = a["scale"] == "log";
    }
    if (axis.log && !(axis.min > 0.0 && axis.max > 0.0))
      throw ConfigError(path + ".min", "log scale needs positive bounds");
    spec.sweep.push_back(axis);
  }
  if (j.contains("analyses")) {
    if (!j["analyses"].is_array()) throw ConfigError("analyses", "'analyses' must be an array");
    for (std::size_t i = 0; i < j["analyses"].size(); ++i) {
      const json& a = j["analyses"][i];
      const std::string path = "analyses[" + std::to_string(i) + "]";
      if (!a.is_string() || std::find(info.analyses.begin(), info.analyses.end(), a.get<std::string>()) == info.analyses.end())
        throw ConfigError(path, "analysis not available for family '" + spec.family + "'");
      spec.analyses.push_back(a.get<std::string>());
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "seed must be a non-negative integer");
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  return spec;
}

json to_json(const ScanSpec& spec) {
  json sweep = json::array();
  for (const auto& a : spec.sweep)
    sweep.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"n", a.n}, {"scale", a.log ? "log" : "linear"}});
  return {{"family", spec.family}, {"params", spec.params}, {"sweep", sweep}, {"analyses", spec.analyses}, {"seed", spec.seed}};
}

ScanResult run_scan(const ScanSpec& spec, int threads) {
  const json& p = spec.params;
  const auto axis = [&](const std::string& name) -> const SweepAxis* {
    for (const auto& a : spec.sweep)
      if (a.name == name) return &a;
    return nullptr;
  };
  ScanResult r;
  if (spec.family == "blue_sky") {
    BlueSkySettings st;
    st.dt = p["dt"].get<double>();
    r = blue_sky_scan(zoo::CircleFunction::sine(p["g_amplitude"].get<double>()), p["omega"].get<double>(),
                      axis("mu")->values(), st, threads);
  } else if (spec.family == "solenoid") {
    zoo::SolidTorusParams q;
    q.m = integer_param(p, "m");
    q.omega = p["omega"].get<double>();
    q.g = zoo::CircleFunction::sine(p["g_amplitude"].get<double>());
    q.fiber_dim = integer_param(p, "fiber_dim");
    q.fiber_radius = p["fiber_radius"].get<double>();
    q.contraction = p["contraction"].get<double>();
    q.offset = p["offset"].get<double>();
    r = solenoid_birth_check(q, axis("contraction")->values(), {}, threads);
  } else if (spec.family == "circle") {
    CircleScanSettings st;
    st.seed = spec.seed;
    st.iterations = integer_param(p, "iterations");
    r = circle_family_scan(integer_param(p, "m"), zoo::CircleFunction::sine(p["g_amplitude"].get<double>()),
                           axis("omega")->values(), st, threads);
  } else {
    zoo::GeomLorenzParams g;
    g.x1s = p["x1s"].get<double>();
    g.x2s = p["x2s"].get<double>();
    g.y1s = p["y1s"].get<double>();
    g.y2s = p["y2s"].get<double>();
    g.A1 = p["A1"].get<double>();
    g.A2 = p["A2"].get<double>();
    g.alpha = p["alpha"].get<double>();
    LorenzScanSettings st;
    st.seed = spec.seed;
    st.iterations = static_cast<long>(p["iterations"].get<double>());
    const bool listed = !spec.analyses.empty();
    const auto wants = [&](const char* a) { return std::find(spec.analyses.begin(), spec.analyses.end(), a) != spec.analyses.end(); };
    st.kneading = !listed || wants("kneading");
    st.verify = wants("verify");
    const auto values = [&](const char* name) { return axis(name) ? axis(name)->values() : std::vector<double>{0.0}; };
    r = lorenz_family_scan(g, values("mu1"), values("mu2"), st, threads);
  }
  r.spec = to_json(spec);
  return r;
}

void write_scan_csv(std::ostream& os, const ScanResult& r) {
  std::set<std::string> diag, text;
  for (const auto& pt : r.points) {
    for (const auto& [k, _] : pt.diagnostics) diag.insert(k);
    for (const auto& [k, _] : pt.text) text.insert(k);
  }
  for (const auto& s : r.swept) os << s << ',';
  os << "tag";
  for (const auto& k : diag) os << ',' << k;
  for (const auto& k : text) os << ',' << k;
  os << '\n';
  for (const auto& pt : r.points) {
    for (const auto& s : r.swept) os << format_double(pt.params.at(s)) << ',';
    os << pt.tag;
    for (const auto& k : diag) {
      os << ',';
      const auto it = pt.diagnostics.find(k);
      if (it != pt.diagnostics.end()) os << format_double(it->second);
    }
    for (const auto& k : text) {
      os << ',';
      const auto it = pt.text.find(k);
      if (it != pt.text.end()) os << it->second;
    }
    os << '\n';
  }
}

std::vector<std::vector<double>> diagnostic_grid(const ScanResult& r, const std::string& key) {
  const int rows = r.shape.size() >= 2 ? r.shape[0] : 1;
  const int cols = r.shape.size() >= 2 ? r.shape[1] : static_cast<int>(r.points.size());
  std::vector<std::vector<double>> g(static_cast<std::size_t>(rows),
                                     std::vector<double>(static_cast<std::size_t>(cols), std::nan("")));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const auto& d = r.points[static_cast<std::size_t>(i) * cols + j].diagnostics;
      const auto it = d.find(key);
      if (it != d.end()) g[i][j] = it->second;
    }
  return g;
}

}  // namespace chaoslab::scan
