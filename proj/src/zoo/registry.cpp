#include "chaoslab/zoo/registry.hpp"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/zoo/models.hpp"

#include <functional>
#include <map>

namespace chaoslab::zoo {
namespace {

using nlohmann::json;

/// Reads declared keys from a params object, rejecting anything undeclared.
class ParamReader {
 public:
  ParamReader(const json& params, json defaults) : params_(params), defaults_(std::move(defaults)) {
    if (!params_.is_object()) throw ConfigError("params", "'params' must be a JSON object");
    for (const auto& [key, _] : params_.items())
      if (!defaults_.contains(key)) throw ConfigError("params." + key, "unknown parameter '" + key + "'");
  }

  double number(const std::string& key) const {
    const json& v = lookup(key);
    if (!v.is_number()) throw ConfigError("params." + key, "parameter '" + key + "' must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key) const {
    const json& v = lookup(key);
    if (!v.is_number_integer())
      throw ConfigError("params." + key, "parameter '" + key + "' must be an integer");
    return v.get<int>();
  }

  Matrix matrix(const std::string& key) const {
    const json& v = lookup(key);
    if (v.is_number()) return Matrix::Constant(1, 1, v.get<double>());
    if (!v.is_array() || v.empty())
      throw ConfigError("params." + key, "parameter '" + key + "' must be a matrix (array of rows)");
    const auto rows = static_cast<long>(v.size());
    const long cols = v[0].is_array() ? static_cast<long>(v[0].size()) : 1;
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
      if (cols == 1 && v[i].is_number()) {
        m(i, 0) = v[i].get<double>();
        continue;
      }
      if (!v[i].is_array() || static_cast<long>(v[i].size()) != cols)
        throw ConfigError("params." + key, "parameter '" + key + "' has ragged rows");
      for (long j = 0; j < cols; ++j) {
        if (!v[i][j].is_number())
          throw ConfigError("params." + key, "parameter '" + key + "' has a non-numeric entry");
        m(i, j) = v[i][j].get<double>();
      }
    }
    return m;
  }

  Vector vector(const std::string& key) const {
    const Matrix m = matrix(key);
    if (m.cols() != 1) throw ConfigError("params." + key, "parameter '" + key + "' must be a vector");
    return m.col(0);
  }

  IntMatrix int_matrix(const std::string& key) const {
    const Matrix m = matrix(key);
    IntMatrix out = m.array().round().cast<long>().matrix();
    if ((out.cast<double>() - m).cwiseAbs().maxCoeff() > 0.0)
      throw ConfigError("params." + key, "parameter '" + key + "' must have integer entries");
    return out;
  }

 private:
  const json& lookup(const std::string& key) const {
    return params_.contains(key) ? params_.at(key) : defaults_.at(key);
  }

  const json& params_;
  json defaults_;
};

struct Entry {
  json defaults;
  std::function<SystemModel(const ParamReader&)> build;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> entries = [] {
    std::map<std::string, Entry> e;
    e["lorenz"] = {{{"sigma", 10.0}, {"r", 28.0}, {"b", 8.0 / 3.0}}, [](const ParamReader& r) {
                     return make_lorenz({r.number("sigma"), r.number("r"), r.number("b")});
                   }};
    e["saddle_node"] = {{{"mu", 0.01}, {"C", json::array({json::array({-1.0})})}, {"Omega", json::array({1.0})}},
                        [](const ParamReader& r) {
                          return make_saddle_node_flow({r.number("mu"), r.matrix("C"), r.vector("Omega")});
                        }};
    e["torus_automorphism"] = {{{"A", json::array({json::array({2, 1}), json::array({1, 1})})}},
                               [](const ParamReader& r) { return make_torus_automorphism(r.int_matrix("A")); }};
    e["cat"] = {json::object(), [](const ParamReader&) { return make_cat_map(); }};
    e["torus_endomorphism"] = {{{"A", json::array({json::array({2, 0}), json::array({0, 2})})}},
                               [](const ParamReader& r) { return make_torus_endomorphism(r.int_matrix("A")); }};
    e["doubling"] = {json::object(), [](const ParamReader&) { return make_doubling_map(); }};
    e["circle"] = {{{"m", 1}, {"g_amplitude", 0.0}, {"omega", 0.0}}, [](const ParamReader& r) {
                     return make_circle_family(r.integer("m"), CircleFunction::sine(r.number("g_amplitude")),
                                               r.number("omega"));
                   }};
    const SolidTorusParams st;
    e["solid_torus"] = {{{"m", st.m},
                         {"omega", st.omega},
                         {"g_amplitude", 0.0},
                         {"mu", st.mu},
                         {"fiber_dim", st.fiber_dim},
                         {"fiber_radius", st.fiber_radius},
                         {"contraction", st.contraction},
                         {"offset", st.offset},
                         {"h_amplitude", st.h_amplitude}},
                        [](const ParamReader& r) {
                          SolidTorusParams p;
                          p.m = r.integer("m");
                          p.omega = r.number("omega");
                          p.g = CircleFunction::sine(r.number("g_amplitude"));
                          p.mu = r.number("mu");
                          p.fiber_dim = r.integer("fiber_dim");
                          p.fiber_radius = r.number("fiber_radius");
                          p.contraction = r.number("contraction");
                          p.offset = r.number("offset");
                          p.h_amplitude = r.number("h_amplitude");
                          return make_solid_torus_map(p);
                        }};
    const GeomLorenzParams gl;
    e["geometric_lorenz"] = {{{"x1s", gl.x1s}, {"x2s", gl.x2s}, {"y1s", gl.y1s}, {"y2s", gl.y2s},
                              {"A1", gl.A1}, {"A2", gl.A2}, {"alpha", gl.alpha}},
                             [](const ParamReader& r) {
                               GeomLorenzParams p;
                               p.x1s = r.number("x1s");
                               p.x2s = r.number("x2s");
                               p.y1s = r.number("y1s");
                               p.y2s = r.number("y2s");
                               p.A1 = r.number("A1");
                               p.A2 = r.number("A2");
                               p.alpha = r.number("alpha");
                               return make_geometric_lorenz(p);
                             }};
    const PiecewiseLinearLorenzParams pl;
    e["pl_lorenz"] = {{{"x1s", pl.x1s}, {"x2s", pl.x2s}, {"y1s", pl.y1s}, {"y2s", pl.y2s},
                       {"fx", pl.fx}, {"fy", pl.fy}, {"gx", pl.gx}, {"gy", pl.gy}},
                      [](const ParamReader& r) {
                        return make_piecewise_linear_lorenz({r.number("x1s"), r.number("x2s"), r.number("y1s"),
                                                             r.number("y2s"), r.number("fx"), r.number("fy"),
                                                             r.number("gx"), r.number("gy")});
                      }};
    const WildMapParams w;
    e["wild"] = {{{"rho", w.rho}, {"eta", w.eta}, {"a", w.a}, {"b", w.b}, {"c", w.c}, {"d", w.d},
                  {"Omega", w.Omega}},
                 [](const ParamReader& r) {
                   return make_wild_map({r.number("rho"), r.number("eta"), r.number("a"), r.number("b"),
                                         r.number("c"), r.number("d"), r.number("Omega")});
                 }};
    return e;
  }();
  return entries;
}

}  // namespace

std::vector<std::string> available_models() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

nlohmann::json default_params(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("model", "unknown model '" + name + "'");
  return it->second.defaults;
}

SystemModel model_from_config(const nlohmann::json& config) {
  if (!config.is_object()) throw ConfigError("model", "model configuration must be a JSON object");
  for (const auto& [key, _] : config.items())
    if (key != "model" && key != "params") throw ConfigError(key, "unknown configuration key '" + key + "'");
  if (!config.contains("model") || !config["model"].is_string())
    throw ConfigError("model", "configuration needs a string 'model' field");
  const std::string name = config["model"].get<std::string>();
  auto it = registry().find(name);
  if (it == registry().end()) {
    std::string list;
    for (const auto& n : available_models()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("model", "unknown model '" + name + "'; available models: " + list);
  }
  const json params = config.contains("params") ? config["params"] : json::object();
  try {
    return it->second.build(ParamReader(params, it->second.defaults));
  } catch (const PreconditionError& e) {
    throw ConfigError("params", std::string("invalid parameters for '") + name + "': " + e.what());
  }
}

}  // namespace chaoslab::zoo
