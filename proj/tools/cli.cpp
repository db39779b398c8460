#include "cli.hpp"

#include "chaoslab/analysis/cells.hpp"
#include "chaoslab/analysis/dimension.hpp"
#include "chaoslab/analysis/lyapunov.hpp"
#include "chaoslab/analysis/periodic.hpp"
#include "chaoslab/analysis/recurrence.hpp"
#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/integrate.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/io/manifest.hpp"
#include "chaoslab/io/svg.hpp"
#include "chaoslab/scan/scan.hpp"
#include "chaoslab/symbolic/kneading.hpp"
#include "chaoslab/verify/conditions.hpp"
#include "chaoslab/zoo/registry.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace chaoslab::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kAnalyses{"lyapunov", "dimension", "recurrence", "periodic", "attractor"};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string fmt(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

// ---------------------------------------------------------------------------
// Config access
// ---------------------------------------------------------------------------

std::string kind_name(const json& j) {
  if (j.is_boolean()) return "a boolean";
  if (j.is_number_integer() || j.is_number_unsigned()) return "an integer";
  if (j.is_number()) return "a number";
  if (j.is_string()) return "a string";
  if (j.is_array()) return "an array";
  return "an object";
}

bool same_kind(const json& def, const json& v) {
  if (def.is_number_integer() || def.is_number_unsigned()) {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  if (def.is_number()) return v.is_number();
  return def.type() == v.type();
}

double num(const json& c, const std::string& key) {
  const json& v = c.at(key);
  if (!v.is_number()) throw ConfigError(key, "'" + key + "' must be a number");
  return v.get<double>();
}

long integer(const json& c, const std::string& key) {
  const double v = num(c, key);
  if (std::floor(v) != v) throw ConfigError(key, "'" + key + "' must be an integer");
  return static_cast<long>(v);
}

long positive(const json& c, const std::string& key) {
  const long v = integer(c, key);
  if (v < 1) throw ConfigError(key, "'" + key + "' must be at least 1");
  return v;
}

double positive_number(const json& c, const std::string& key) {
  const double v = num(c, key);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "'" + key + "' must be positive");
  return v;
}

std::uint64_t seed_of(const json& c) { return c.at("seed").get<std::uint64_t>(); }
int threads_of(const json& c) { return static_cast<int>(c.at("threads").get<long>()); }

Vector vec(const json& v, const std::string& key, int dim = -1) {
  if (!v.is_array()) throw ConfigError(key, "'" + key + "' must be an array of numbers");
  if (dim >= 0 && static_cast<int>(v.size()) != dim)
    throw ConfigError(key, "'" + key + "' needs " + std::to_string(dim) + " entries");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(key, "'" + key + "' has a non-numeric entry");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Matrix matrix_of(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty() || !v[0].is_array()) throw ConfigError(key, "'" + key + "' must be an array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Matrix A(n, static_cast<Eigen::Index>(v[0].size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector row = vec(v[static_cast<std::size_t>(i)], key, static_cast<int>(A.cols()));
    A.row(i) = row.transpose();
  }
  return A;
}

SystemModel load_model(const json& c) {
  if (!c.at("model").is_string()) throw ConfigError("model", "'model' must name a model");
  return zoo::model_from_config({{"model", c["model"]}, {"params", c["params"]}});
}

/// Explicit "initial" for index 0, otherwise a seeded draw from the domain
/// (unbounded axes clipped to [-1, 1]) away from the locus.
State initial_state(const SystemModel& m, const json& c, std::uint64_t index = 0) {
  if (index == 0 && c.contains("initial") && !c["initial"].is_null()) {
    State s = vec(c["initial"], "initial", m.dimension);
    if (!m.domain.contains(s)) throw ConfigError("initial", "'initial' lies outside the model domain");
    return s;
  }
  auto rng = make_rng(seed_of(c), index);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    State s(m.dimension);
    for (int i = 0; i < m.dimension; ++i) {
      const Axis& a = m.domain.axes[static_cast<std::size_t>(i)];
      if (a.period > 0) {
        s[i] = uniform(rng, 0.0, a.period);
      } else {
        double lo = std::max(a.lo, -1.0), hi = std::min(a.hi, 1.0);
        if (!(lo < hi)) lo = a.lo, hi = a.hi;
        s[i] = uniform(rng, lo, hi);
      }
    }
    if (m.domain.contains(s) && !m.near_locus(s)) return s;
  }
  throw PreconditionError("no initial state away from the discontinuity locus was found");
}

/// Flows run for t + extra time units, maps for n + extra iterations.
Orbit make_orbit(const SystemModel& m, const State& s0, const json& c, double extra, int stride) {
  if (m.is_flow()) {
    StepSettings st;
    st.dt = positive_number(c, "dt");
    st.record_stride = stride;
    return integrate_flow(m, s0, positive_number(c, "t") + extra, st);
  }
  return iterate_map(m, s0, positive(c, "n") + static_cast<long>(extra), stride);
}

Orbit drop_transient(const Orbit& o, double transient) {
  Orbit out;
  out.meta = o.meta;
  out.termination = o.termination;
  out.detail = o.detail;
  for (std::size_t i = 0; i < o.size(); ++i)
    if (o.times[i] >= transient) out.push(o.times[i], o.states[i]);
  return out;
}

std::string census(const std::map<std::string, int>& counts) {
  std::string s;
  for (const auto& [k, n] : counts) s += (s.empty() ? "" : ", ") + k + " " + std::to_string(n);
  return s;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

Outcome cmd_simulate(const json& c) {
  const SystemModel m = load_model(c);
  const Orbit o = make_orbit(m, initial_state(m, c), c, 0.0, static_cast<int>(positive(c, "stride")));
  Outcome out;
  std::ostringstream csv;
  write_orbit_csv(csv, o);
  out.files["orbit.csv"] = csv.str();

  std::vector<double> x, y;
  const bool planar = m.dimension >= 2;
  io::SvgFigure fig(m.id + " orbit", planar ? "c0" : "t", planar ? "c1" : "c0");
  for (std::size_t i = 0; i < o.size(); ++i) {
    x.push_back(planar ? o.states[i][0] : o.times[i]);
    y.push_back(planar ? o.states[i][1] : o.states[i][0]);
  }
  fig.polyline(x, y);
  out.files["orbit.svg"] = fig.render();
  out.summary = "simulate " + m.id + ": " + std::to_string(o.size()) + " samples, " + to_string(o.termination) +
                (o.detail.empty() ? "" : " (" + o.detail + ")") + "\n";
  return out;
}

Outcome cmd_verify(const json& c) {
  std::string check = c["check"].get<std::string>();
  verify::Grid grid;
  grid.n = static_cast<int>(positive(c, "grid_n"));
  grid.delta = positive_number(c, "delta");
  grid.sequence_length = static_cast<int>(positive(c, "sequence_length"));
  grid.threads = threads_of(c);

  const std::string model_name = c["model"].is_string() ? c["model"].get<std::string>() : "";
  if (check == "auto") {
    if (!c["matrix"].is_null()) check = "anosov";
    else if (!c["exponents"].is_null()) check = "saddle_focus";
    else if (model_name == "cat" || model_name == "torus_automorphism") check = "anosov";
    else if (model_name == "doubling" || model_name == "torus_endomorphism" || model_name == "circle")
      check = "expansion";
    else if (model_name == "geometric_lorenz" || model_name == "pl_lorenz") check = "lorenz";
    else if (model_name == "wild") check = "pseudohyperbolic";
    else
      throw ConfigError("check", "no default check for model '" + model_name +
                                     "'; choose anosov, expansion, lorenz, pseudohyperbolic or saddle_focus");
  }

  verify::ConditionReport report;
  if (check == "anosov") {
    Matrix A;
    if (!c["matrix"].is_null()) {
      A = matrix_of(c["matrix"], "matrix");
    } else {
      const SystemModel m = load_model(c);
      A = jacobian_at(m, State::Zero(m.dimension)).matrix;
    }
    if (A.rows() != A.cols()) throw ConfigError("matrix", "'matrix' must be square");
    report = verify::check_anosov_matrix(A);
  } else if (check == "expansion") {
    report = verify::check_expansion(load_model(c), grid);
  } else if (check == "lorenz") {
    report = verify::check_lorenz_conditions(load_model(c), grid);
  } else if (check == "pseudohyperbolic") {
    report = verify::check_pseudohyperbolic(load_model(c), grid, num(c, "beta"));
  } else if (check == "saddle_focus") {
    const json& e = c["exponents"];
    if (!e.is_object()) throw ConfigError("exponents", "'exponents' must be an object {gamma, lambda, omega, alphas}");
    verify::SaddleFocusExponents x;
    for (const auto& [k, v] : e.items()) {
      if (k == "alphas") {
        const Vector a = vec(v, "exponents.alphas");
        x.alphas.assign(a.data(), a.data() + a.size());
      } else if (k == "gamma" || k == "lambda" || k == "omega") {
        if (!v.is_number()) throw ConfigError("exponents." + k, "'" + k + "' must be a number");
        (k == "gamma" ? x.gamma : k == "lambda" ? x.lambda : x.omega) = v.get<double>();
      } else {
        throw ConfigError("exponents." + k, "unknown exponent '" + k + "'");
      }
    }
    report = verify::check_saddle_focus_gap(x);
  } else {
    throw ConfigError("check", "unknown check '" + check + "'");
  }

  Outcome out;
  json j = verify::to_json(report);
  out.files["report.json"] = dump(j);
  int failed = 0;
  std::ostringstream os;
  for (const auto& r : report.conditions) {
    failed += r.holds ? 0 : 1;
    os << "  " << r.id << "  " << (r.holds ? "holds" : "FAILS") << "  witness " << fmt(r.witness_value);
    if (r.witness_point.size() > 0) os << " at " << fmt(r.witness_point);
    os << "\n";
  }
  for (const auto& [k, v] : report.derived) os << "  " << k << " = " << fmt(v) << "\n";
  out.summary = "verify " + report.subject + " (" + check + "): " +
                (failed == 0 ? "all conditions hold" : std::to_string(failed) + " condition(s) fail") + "\n" + os.str();
  out.exit_code = report.all_hold() ? kOk : kVerdictFailed;
  return out;
}

Outcome cmd_lyapunov(const json& c) {
  const SystemModel m = load_model(c);
  LyapunovSettings ls;
  ls.duration = m.is_flow() ? positive_number(c, "t") : static_cast<double>(positive(c, "n"));
  ls.exponents = static_cast<int>(integer(c, "exponents"));
  ls.transient = num(c, "transient");
  ls.renorm_interval = positive_number(c, "renorm_interval");
  ls.step.dt = positive_number(c, "dt");
  ls.history_points = static_cast<int>(positive(c, "history_points"));
  ls.seed = seed_of(c);
  const LyapunovResult r = lyapunov_spectrum(m, initial_state(m, c), ls);

  Outcome out;
  out.files["lyapunov.json"] = dump(to_json(r));
  io::SvgFigure fig(m.id + " Lyapunov exponents", m.is_flow() ? "time" : "iteration", "running estimate");
  for (std::size_t i = 0; i < r.exponents.size(); ++i) {
    std::vector<double> y;
    for (const auto& h : r.history) y.push_back(h[i]);
    fig.polyline(r.history_time, y, io::palette(i));
    fig.legend("lambda" + std::to_string(i + 1), io::palette(i));
  }
  out.files["lyapunov.svg"] = fig.render();
  std::string ex;
  for (double v : r.exponents) ex += " " + fmt(v);
  out.summary = "lyapunov " + m.id + ":" + ex + " (sum " + fmt(r.sum()) + ", " +
                (r.converged ? "converged" : "not converged") + ", " + to_string(r.termination) + ")\n";
  if (r.termination != Termination::Completed) out.exit_code = kVerdictFailed;
  return out;
}

Outcome cmd_dimension(const json& c) {
  const SystemModel m = load_model(c);
  const double transient = num(c, "transient");
  const int stride = static_cast<int>(positive(c, "stride"));
  const long orbits = positive(c, "orbits");
  std::vector<Vector> points;
  for (long k = 0; k < orbits; ++k) {
    const Orbit o = make_orbit(m, initial_state(m, c, static_cast<std::uint64_t>(k)), c, transient, stride);
    for (std::size_t i = 0; i < o.size(); ++i)
      if (o.times[i] >= transient) points.push_back(o.states[i]);
  }
  ScaleRange range;
  range.min_level = static_cast<int>(positive(c, "min_level"));
  range.max_level = static_cast<int>(integer(c, "max_level"));
  const BoxDimensionResult r = box_counting_dimension(points, range, threads_of(c));

  Outcome out;
  json j = to_json(r);
  j["points"] = points.size();
  j["model"] = m.id;
  out.files["dimension.json"] = dump(j);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.counts.size(); ++i) {
    x.push_back(std::log2(1.0 / r.box_sizes[i]));
    y.push_back(std::log2(static_cast<double>(r.counts[i])));
  }
  io::SvgFigure fig(m.id + " box counting", "log2(1/h)", "log2 N(h)");
  fig.polyline(x, y);
  out.files["dimension.svg"] = fig.render();
  out.summary = "dimension " + m.id + ": " + fmt(r.dimension) + " (r^2 " + fmt(r.r_squared) + ", " +
                std::to_string(points.size()) + " points" + (r.degenerate ? ", degenerate fit" : "") + ")\n";
  return out;
}

Outcome cmd_recurrence(const json& c) {
  const SystemModel m = load_model(c);
  const double transient = num(c, "transient");
  const Orbit o = drop_transient(make_orbit(m, initial_state(m, c), c, transient, 1), transient);
  if (o.empty()) throw PreconditionError("the orbit ended during the transient");
  const State center = c["center"].is_null() ? o.front() : vec(c["center"], "center", m.dimension);
  const double radius = positive_number(c, "radius");
  const RecurrenceResult r = recurrence_times(o, center, radius, m.domain);
  const auto distinct = r.distinct_gaps(positive_number(c, "tolerance"));

  Outcome out;
  out.files["recurrence.json"] = dump({{"model", m.id},
                                       {"center", std::vector<double>(center.data(), center.data() + center.size())},
                                       {"radius", radius},
                                       {"visits", r.entry_times.size()},
                                       {"entry_times", r.entry_times},
                                       {"gaps", r.gaps},
                                       {"max_gap", r.max_gap()},
                                       {"mean_gap", r.mean_gap()},
                                       {"distinct_gaps", distinct}});
  out.summary = "recurrence " + m.id + ": " + std::to_string(r.entry_times.size()) + " visits, max gap " +
                fmt(r.max_gap()) + ", mean gap " + fmt(r.mean_gap()) + ", " + std::to_string(distinct.size()) +
                " distinct gaps\n";
  return out;
}

Outcome cmd_periodic(const json& c) {
  const SystemModel m = load_model(c);
  PeriodicSearchSettings ps;
  ps.seeds = static_cast<int>(positive(c, "seeds"));
  ps.seed = seed_of(c);
  ps.tolerance = positive_number(c, "tolerance");
  ps.threads = threads_of(c);
  if (!c["box"].is_null()) {
    if (!c["box"].is_array()) throw ConfigError("box", "'box' must be an array of [lo, hi] pairs");
    for (const auto& b : c["box"]) {
      const Vector p = vec(b, "box", 2);
      ps.box.emplace_back(p[0], p[1]);
    }
  }
  const int n = static_cast<int>(positive(c, "period"));
  const auto recs = find_periodic_points(m, n, ps);

  Outcome out;
  json arr = json::array();
  std::ostringstream csv;
  csv << "period,minimal_period,stability,neutral,residual,max_abs_multiplier";
  for (int i = 0; i < m.dimension; ++i) csv << ",x" << i;
  csv << "\n";
  std::map<std::string, int> counts;
  for (const auto& r : recs) {
    arr.push_back(to_json(r));
    double mu = 0.0;
    for (const auto& z : r.multipliers) mu = std::max(mu, std::abs(z));
    csv << r.period << ',' << r.minimal_period << ',' << to_string(r.stability) << ',' << (r.neutral ? 1 : 0) << ','
        << format_double(r.residual) << ',' << format_double(mu);
    for (Eigen::Index i = 0; i < r.point.size(); ++i) csv << ',' << format_double(r.point[i]);
    csv << "\n";
    ++counts[to_string(r.stability)];
  }
  out.files["periodic.json"] = dump(arr);
  out.files["periodic.csv"] = csv.str();
  out.summary = "periodic " + m.id + ": " + std::to_string(recs.size()) + " points of period " + std::to_string(n) +
                (counts.empty() ? "" : " (" + census(counts) + ")") + "\n";
  return out;
}

Outcome cmd_attractor(const json& c) {
  const SystemModel m = load_model(c);
  const double h = positive_number(c, "h");
  // A reference orbit supplies the default box and seed point.
  json probe = c;
  probe["t"] = 100.0;
  probe["n"] = 10000;
  const Orbit o = make_orbit(m, initial_state(m, c), probe, 0.0, 1);
  if (o.empty()) throw PreconditionError("reference orbit is empty");

  Vector lo(m.dimension), hi(m.dimension);
  if (!c["lo"].is_null() || !c["hi"].is_null()) {
    if (c["lo"].is_null() || c["hi"].is_null()) throw ConfigError(c["lo"].is_null() ? "lo" : "hi", "give both 'lo' and 'hi'");
    lo = vec(c["lo"], "lo", m.dimension);
    hi = vec(c["hi"], "hi", m.dimension);
  } else {
    for (int i = 0; i < m.dimension; ++i) {
      const Axis& a = m.domain.axes[static_cast<std::size_t>(i)];
      if (a.period > 0) {
        lo[i] = 0.0, hi[i] = a.period;
        continue;
      }
      double mn = o.states[o.size() / 10][i], mx = mn;
      for (std::size_t k = o.size() / 10; k < o.size(); ++k) mn = std::min(mn, o.states[k][i]), mx = std::max(mx, o.states[k][i]);
      const double pad = 0.1 * (mx - mn) + h;
      lo[i] = std::max(a.lo, h * std::floor((mn - pad) / h));
      hi[i] = std::min(a.hi, h * std::ceil((mx + pad) / h));
    }
  }
  const State seed_point = c["seed_point"].is_null() ? o.back() : vec(c["seed_point"], "seed_point", m.dimension);

  CellGraphSettings cs;
  cs.h = h;
  cs.eps = positive_number(c, "eps");
  cs.tau = positive_number(c, "tau");
  cs.samples_per_cell = static_cast<int>(positive(c, "samples"));
  cs.adaptive = c["adaptive"].get<bool>();
  cs.max_cells = positive(c, "max_cells");
  cs.seed = seed_of(c);
  cs.threads = threads_of(c);
  cs.step.dt = positive_number(c, "dt");
  const CellGraph g = build_cell_graph(m, lo, hi, cs);
  const long seed_cell = g.cell_of(seed_point);
  if (seed_cell < 0) throw ConfigError("seed_point", "'seed_point' lies outside the cell box");
  const ChainAttractor a = chain_attractor(g, seed_cell);

  Outcome out;
  std::ostringstream cells;
  write_cells_csv(cells, g, a.cells);
  out.files["attractor_cells.csv"] = cells.str();
  if (c["edges"].get<bool>()) {
    std::ostringstream edges;
    write_edges_csv(edges, g);
    out.files["attractor_edges.csv"] = edges.str();
  }
  auto as_vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  out.files["attractor.json"] = dump({{"model", m.id},
                                      {"lo", as_vec(lo)},
                                      {"hi", as_vec(hi)},
                                      {"shape", g.shape},
                                      {"h", cs.h},
                                      {"eps", cs.eps},
                                      {"tau", cs.tau},
                                      {"samples_per_cell", cs.samples_per_cell},
                                      {"adaptive", cs.adaptive},
                                      {"edges", g.edge_count()},
                                      {"seed_cell", seed_cell},
                                      {"cells", a.cells.size()},
                                      {"components", a.components},
                                      {"reachable", a.reachable},
                                      {"touches_boundary", a.touches_boundary}});

  io::SvgFigure fig(m.id + " chain attractor (projection)", "c0", m.dimension > 1 ? "c1" : "");
  std::set<std::pair<long, long>> seen;
  for (long cell : a.cells) {
    const Vector l = g.cell_lo(cell), u = g.cell_hi(cell);
    const double y0 = m.dimension > 1 ? l[1] : 0.0, y1 = m.dimension > 1 ? u[1] : 1.0;
    const auto key = std::make_pair(std::lround(l[0] / h), std::lround(y0 / h));
    if (!seen.insert(key).second) continue;
    fig.rect(l[0], y0, u[0], y1, "#1f77b4");
  }
  out.files["attractor.svg"] = fig.render();
  long total = 1;
  for (int n : g.shape) total *= n;
  out.summary = "attractor " + m.id + ": " + std::to_string(a.cells.size()) + " of " + std::to_string(total) +
                " cells in " + std::to_string(a.components) + " component(s), reachable " +
                std::to_string(a.reachable) + ", touches boundary: " + (a.touches_boundary ? "yes" : "no") + "\n";
  return out;
}

json scan_to_json(const scan::ScanResult& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"params", p.params}, {"tag", p.tag}, {"diagnostics", p.diagnostics}, {"text", p.text}});
  return {{"family", r.family}, {"swept", r.swept},   {"shape", r.shape},
          {"spec", r.spec},     {"code_version", r.code_version}, {"points", pts}};
}

std::string scan_svg(const scan::ScanResult& r, const scan::ScanSpec& spec) {
  static const std::map<std::string, std::string> primary{
      {"blue_sky", "period"}, {"solenoid", "overlap_slack"}, {"circle", "lyapunov"}, {"lorenz", "lambda1"}};
  std::map<std::string, std::string> colors;
  for (const auto& p : r.points)
    if (!colors.count(p.tag)) colors[p.tag] = io::palette(colors.size());

  if (r.swept.size() == 1) {
    const std::string key = primary.at(r.family);
    io::SvgFigure fig(r.family + " scan", r.swept[0], key);
    fig.log_x(spec.sweep[0].log);
    std::vector<double> x, y;
    for (const auto& p : r.points) {
      x.push_back(p.params.at(r.swept[0]));
      y.push_back(p.diagnostics.count(key) ? p.diagnostics.at(key) : std::nan(""));
    }
    fig.polyline(x, y);
    for (const auto& [tag, color] : colors) fig.legend(tag, color);
    return fig.render();
  }
  auto coordinate = [&](std::size_t axis, double v) { return spec.sweep[axis].log ? std::log10(v) : v; };
  auto label = [&](std::size_t axis) { return (spec.sweep[axis].log ? "log10 " : "") + r.swept[axis]; };
  io::SvgFigure fig(r.family + " scan tags", label(0), label(1));
  const auto v0 = spec.sweep[0].values(), v1 = spec.sweep[1].values();
  const double d0 = (coordinate(0, v0.back()) - coordinate(0, v0.front())) / (v0.size() - 1);
  const double d1 = (coordinate(1, v1.back()) - coordinate(1, v1.front())) / (v1.size() - 1);
  for (std::size_t i = 0; i < v0.size(); ++i)
    for (std::size_t j = 0; j < v1.size(); ++j) {
      const auto& p = r.points[i * v1.size() + j];
      const double x = coordinate(0, v0[i]), y = coordinate(1, v1[j]);
      fig.rect(x - d0 / 2, y - d1 / 2, x + d0 / 2, y + d1 / 2, colors.at(p.tag));
    }
  for (const auto& [tag, color] : colors) fig.legend(tag, color);
  return fig.render();
}

Outcome cmd_scan(const json& c) {
  if (c["spec"].is_null()) throw ConfigError("spec", "scan needs a spec (file argument or 'spec' in the config)");
  json sj = c["spec"];
  if (sj.is_object() && !sj.contains("seed")) sj["seed"] = c["seed"];
  scan::ScanSpec spec;
  try {
    spec = scan::parse_scan_spec(sj);
  } catch (const ConfigError& e) {
    throw ConfigError("spec." + e.key(), e.what());
  }
  const scan::ScanResult r = scan::run_scan(spec, threads_of(c));

  Outcome out;
  std::ostringstream csv;
  scan::write_scan_csv(csv, r);
  out.files["scan.csv"] = csv.str();
  out.files["scan.json"] = dump(scan_to_json(r));
  out.files["scan.svg"] = scan_svg(r, spec);
  std::map<std::string, int> counts;
  for (const auto& p : r.points) ++counts[p.tag];
  out.summary = "scan " + r.family + ": " + std::to_string(r.points.size()) + " points (" + census(counts) + ")\n";
  return out;
}

struct KneadingSource {
  symbolic::KneadingInvariant k;
  symbolic::IntervalMap1D<double> G;
  bool left_reverses = false, right_reverses = false;
};

KneadingSource kneading_source(const json& model, const json& params, const json& slopes, int N,
                               const std::string& prefix) {
  KneadingSource s;
  if (model.is_string()) {
    const SystemModel m = zoo::model_from_config({{"model", model}, {"params", params}});
    s.G = symbolic::reduce_to_1d(m);
    s.k = symbolic::kneading_invariant(s.G, N);
  } else {
    if (!model.is_null()) throw ConfigError(prefix + "model", "'model' must name a model or be null");
    const Vector p = vec(slopes, prefix + "slopes", 4);
    s.G = symbolic::piecewise_linear_map<double>(p[0], p[1], p[2], p[3]);
    s.k = symbolic::kneading_invariant(symbolic::piecewise_linear_map<symbolic::HighPrecision>(p[0], p[1], p[2], p[3]), N);
  }
  s.left_reverses = !s.G.left_increasing;
  s.right_reverses = !s.G.right_increasing;
  return s;
}

Outcome cmd_kneading(const json& c) {
  const int N = static_cast<int>(positive(c, "length"));
  const KneadingSource a = kneading_source(c["model"], c["params"], c["slopes"], N, "");
  const symbolic::TransitionMatrix t = symbolic::build_transition_matrix(a.G, static_cast<int>(positive(c, "depth")));

  Outcome out;
  std::string text = symbolic::to_text(a.k);
  json j = {{"kneading", symbolic::to_json(a.k)}, {"transition", symbolic::to_json(t)}};
  if (!c["compare"].is_null()) {
    const json& cmp = c["compare"];
    KneadingSource b;
    if (cmp.is_array()) {
      b = kneading_source(nullptr, json::object(), cmp, N, "compare.");
    } else if (cmp.is_object()) {
      for (const auto& [k, _] : cmp.items())
        if (k != "model" && k != "params" && k != "slopes") throw ConfigError("compare." + k, "unknown key '" + k + "'");
      b = kneading_source(cmp.value("model", json()), cmp.value("params", json::object()),
                          cmp.value("slopes", json()), N, "compare.");
    } else {
      throw ConfigError("compare", "'compare' must be a slope array or an object");
    }
    const auto r = symbolic::compare_kneading(a.k, b.k, a.left_reverses, a.right_reverses);
    text += "compare: " + symbolic::to_text(r) + "\n";
    j["compare"] = {{"kneading", symbolic::to_json(b.k)},
                    {"equal", r.equal},
                    {"plus_index", r.plus_index},
                    {"minus_index", r.minus_index},
                    {"order", r.order}};
  }
  std::ostringstream csv;
  symbolic::write_transition_csv(csv, t);
  out.files["kneading.txt"] = text;
  out.files["kneading.json"] = dump(j);
  out.files["transition.csv"] = csv.str();
  out.summary = text + "entropy (depth " + std::to_string(t.depth) + "): " + fmt(t.entropy) + "\n";
  return out;
}

json with_common(json j) {
  j["seed"] = kDefaultSeed;
  j["threads"] = 1;
  return j;
}

json model_keys(const char* model) { return {{"model", model}, {"params", json::object()}, {"initial", nullptr}}; }

json merge(json a, const json& b) {
  a.update(b);
  return a;
}

std::vector<io::OutputFile> write_outputs(const fs::path& dir, const Outcome& o) {
  fs::create_directories(dir);
  std::vector<io::OutputFile> files;
  for (const auto& [name, content] : o.files) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("out", "cannot write '" + (dir / name).string() + "'");
    f << content;
    files.push_back({name, io::sha256_hex(content), content.size()});
  }
  return files;
}

io::RunManifest write_run(const fs::path& dir, const std::string& command, const json& config, const Outcome& o,
                          const std::string& started) {
  io::RunManifest m;
  m.command = command;
  m.config = config;
  m.code_version = CHAOSLAB_VERSION;
  m.seed = seed_of(config);
  m.started = started;
  m.outputs = write_outputs(dir, o);
  m.finished = io::utc_timestamp();
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << dump(io::to_json(m));
  return m;
}

/// JSON if it parses, a number array for comma lists, otherwise a string.
json parse_value(const std::string& raw) {
  try {
    return json::parse(raw);
  } catch (const json::parse_error&) {
  }
  if (raw.find(',') != std::string::npos) {
    json arr = json::array();
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        arr.push_back(json::parse(item));
      } catch (const json::parse_error&) {
        arr.push_back(item);
      }
    }
    return arr;
  }
  return raw;
}

int replay(const std::string& path, const std::optional<std::string>& out_dir, std::ostream& out) {
  const io::RunManifest m = io::manifest_from_json(io::read_json_file(path, "manifest"));
  const auto cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), m.command) == cmds.end())
    throw ConfigError("command", "manifest names an unknown command '" + m.command + "'");
  const json config = resolve_config(m.command, m.config);
  const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(path).parent_path() / "replay";
  const std::string started = io::utc_timestamp();
  const Outcome o = execute(m.command, config);
  const io::RunManifest again = write_run(dir, m.command, config, o, started);

  int same = 0;
  for (const auto& f : m.outputs) {
    const auto it = std::find_if(again.outputs.begin(), again.outputs.end(),
                                 [&](const io::OutputFile& g) { return g.path == f.path; });
    const bool ok = it != again.outputs.end() && it->sha256 == f.sha256;
    same += ok ? 1 : 0;
    out << "  " << f.path << "  " << (ok ? "identical" : "DIFFERS") << "\n";
  }
  const bool all = same == static_cast<int>(m.outputs.size()) && again.outputs.size() == m.outputs.size();
  out << "replay " << m.command << ": " << same << " of " << m.outputs.size() << " outputs identical"
      << (m.code_version != CHAOSLAB_VERSION ? " (recorded with version " + m.code_version + ")" : "") << "\n";
  return all ? kOk : kVerdictFailed;
}

}  // namespace

std::vector<std::string> commands() {
  std::vector<std::string> c{"simulate", "verify", "scan", "kneading"};
  for (const auto& a : kAnalyses) c.push_back("analyze " + a);
  return c;
}

json default_config(const std::string& command) {
  if (command == "simulate")
    return with_common(merge(model_keys("lorenz"), {{"t", 100.0}, {"n", 1000}, {"dt", 0.01}, {"stride", 1}}));
  if (command == "verify")
    return with_common({{"model", "wild"},
                        {"params", json::object()},
                        {"check", "auto"},
                        {"matrix", nullptr},
                        {"exponents", nullptr},
                        {"grid_n", 64},
                        {"delta", 1e-4},
                        {"sequence_length", 20},
                        {"beta", 0.45}});
  if (command == "analyze lyapunov")
    return with_common(merge(model_keys("lorenz"), {{"t", 1000.0},
                                                    {"n", 100000},
                                                    {"dt", 0.01},
                                                    {"exponents", 0},
                                                    {"transient", 0.0},
                                                    {"renorm_interval", 1.0},
                                                    {"history_points", 100}}));
  if (command == "analyze dimension")
    return with_common(merge(model_keys("lorenz"), {{"t", 1000.0},
                                                    {"n", 100000},
                                                    {"dt", 0.01},
                                                    {"stride", 1},
                                                    {"transient", 10.0},
                                                    {"orbits", 1},
                                                    {"min_level", 1},
                                                    {"max_level", 0}}));
  if (command == "analyze recurrence")
    return with_common(merge(model_keys("lorenz"), {{"t", 1000.0},
                                                    {"n", 100000},
                                                    {"dt", 0.01},
                                                    {"transient", 10.0},
                                                    {"center", nullptr},
                                                    {"radius", 1.0},
                                                    {"tolerance", 1e-9}}));
  if (command == "analyze periodic")
    return with_common({{"model", "doubling"},
                        {"params", json::object()},
                        {"period", 1},
                        {"seeds", 1000},
                        {"tolerance", 1e-11},
                        {"box", nullptr}});
  if (command == "analyze attractor")
    return with_common(merge(model_keys("lorenz"), {{"h", 1.0},
                                                    {"eps", 0.5},
                                                    {"tau", 0.5},
                                                    {"samples", 8},
                                                    {"adaptive", true},
                                                    {"dt", 0.02},
                                                    {"lo", nullptr},
                                                    {"hi", nullptr},
                                                    {"seed_point", nullptr},
                                                    {"max_cells", 2000000},
                                                    {"edges", false}}));
  if (command == "scan") return with_common({{"spec", nullptr}});
  if (command == "kneading")
    return with_common({{"model", nullptr},
                        {"params", json::object()},
                        {"slopes", {2.0, 1.0, 2.0, -1.0}},
                        {"length", 64},
                        {"depth", 1},
                        {"compare", nullptr}});
  throw ConfigError("command", "unknown command '" + command + "'");
}

json resolve_config(const std::string& command, const json& user) {
  json c = default_config(command);
  if (user.is_null()) return c;
  if (!user.is_object()) throw ConfigError("config", "configuration must be a JSON object");
  for (const auto& [key, v] : user.items()) {
    if (!c.contains(key)) throw ConfigError(key, "unknown key '" + key + "' for " + command);
    const json& d = c[key];
    if (!d.is_null() && !v.is_null() && !same_kind(d, v))
      throw ConfigError(key, "'" + key + "' must be " + kind_name(d));
    c[key] = (d.is_number_integer() || d.is_number_unsigned()) && v.is_number_float()
                 ? json(static_cast<long>(v.get<double>()))
                 : v;
  }
  if (!c["seed"].is_number_unsigned() && !(c["seed"].is_number_integer() && c["seed"].get<long>() >= 0))
    throw ConfigError("seed", "'seed' must be a non-negative integer");
  c["seed"] = c["seed"].get<std::uint64_t>();
  if (c["threads"].get<long>() < 1) throw ConfigError("threads", "'threads' must be at least 1");
  return c;
}

Outcome execute(const std::string& command, const json& config) {
  if (command == "simulate") return cmd_simulate(config);
  if (command == "verify") return cmd_verify(config);
  if (command == "analyze lyapunov") return cmd_lyapunov(config);
  if (command == "analyze dimension") return cmd_dimension(config);
  if (command == "analyze recurrence") return cmd_recurrence(config);
  if (command == "analyze periodic") return cmd_periodic(config);
  if (command == "analyze attractor") return cmd_attractor(config);
  if (command == "scan") return cmd_scan(config);
  if (command == "kneading") return cmd_kneading(config);
  throw ConfigError("command", "unknown command '" + command + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chaoslab " CHAOSLAB_VERSION ": simulation, verification and analysis of chaotic systems", "chaoslab"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir = "chaoslab-out", seed, threads;
  auto* o_config = app.add_option("--config", config_path, "JSON configuration file");
  auto* o_seed = app.add_option("--seed", seed, "master seed (unsigned 64-bit)");
  auto* o_out = app.add_option("--out", out_dir, "output directory (default chaoslab-out)");
  auto* o_threads = app.add_option("--threads", threads, "worker threads");

  // Every subcommand flag lands in `raw` under its config key.
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::vector<std::string> param_pairs;
  auto flags = [&](CLI::App* sub, std::initializer_list<std::pair<const char*, const char*>> list) {
    for (const auto& [flag, help] : list) {
      std::string key = flag;
      std::replace(key.begin(), key.end(), '-', '_');
      sub->add_option(std::string("--") + flag, raw[sub->get_name()][key], help);
    }
  };
  auto model_flags = [&](CLI::App* sub) {
    flags(sub, {{"model", "model name"}, {"initial", "initial state, e.g. 1,1,1"}});
    sub->add_option("--param", param_pairs, "model parameter key=value (repeatable)");
  };

  auto* simulate = app.add_subcommand("simulate", "integrate or iterate a model and write the orbit");
  model_flags(simulate);
  flags(simulate, {{"t", "flow duration"}, {"n", "map iterations"}, {"dt", "RK4 step"}, {"stride", "record stride"}});

  auto* verify = app.add_subcommand("verify", "check hyperbolicity conditions; exit 1 if any fails");
  model_flags(verify);
  flags(verify, {{"check", "auto, anosov, expansion, lorenz, pseudohyperbolic or saddle_focus"},
                 {"matrix", "integer matrix as JSON rows"},
                 {"exponents", "saddle-focus exponents as JSON"},
                 {"grid-n", "sampling grid size"},
                 {"delta", "locus exclusion band"},
                 {"sequence-length", "limit sequence length"},
                 {"beta", "pseudo-hyperbolicity exponent"}});

  auto* analyze = app.add_subcommand("analyze", "attractor analyses");
  analyze->set_help_flag("--help", "print this help message and exit");
  std::string kind;
  analyze->add_option("kind", kind, "lyapunov, dimension, recurrence, periodic or attractor")
      ->required()
      ->check(CLI::IsMember(kAnalyses));
  model_flags(analyze);
  flags(analyze, {{"t", "flow duration"},
                  {"n", "map iterations"},
                  {"dt", "RK4 step"},
                  {"stride", "record stride"},
                  {"transient", "discarded initial time or iterations"},
                  {"exponents", "number of Lyapunov exponents (0: all)"},
                  {"renorm-interval", "QR interval"},
                  {"history-points", "convergence checkpoints"},
                  {"orbits", "number of orbits for box counting"},
                  {"min-level", "finest-scale range start"},
                  {"max-level", "finest-scale range end (0: auto)"},
                  {"center", "recurrence ball center"},
                  {"radius", "recurrence ball radius"},
                  {"tolerance", "tolerance"},
                  {"period", "period n"},
                  {"seeds", "Newton seeds"},
                  {"box", "seed box as JSON [[lo,hi],...]"},
                  {"h", "cell side"},
                  {"eps", "image inflation"},
                  {"tau", "flow time per edge"},
                  {"samples", "samples per cell"},
                  {"adaptive", "add stretch-aware grid samples (true/false)"},
                  {"lo", "cell box lower corner"},
                  {"hi", "cell box upper corner"},
                  {"seed-point", "state whose cell seeds the attractor"},
                  {"max-cells", "cell cap"},
                  {"edges", "also write the edge list"}});

  auto* scan_cmd = app.add_subcommand("scan", "parameter scan from a JSON spec");
  std::string spec_path;
  scan_cmd->add_option("spec", spec_path, "scan spec file");

  auto* kneading = app.add_subcommand("kneading", "kneading invariant of a Lorenz-type map");
  flags(kneading, {{"model", "planar Lorenz-type model to reduce"},
                   {"slopes", "piecewise-linear map sl,ol,sr,or"},
                   {"length", "sequence length"},
                   {"depth", "transition partition depth"},
                   {"compare", "second map: slopes or JSON object"}});
  kneading->add_option("--param", param_pairs, "model parameter key=value (repeatable)");

  auto* replay_cmd = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
  std::string manifest_path;
  replay_cmd->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();

  try {
    std::vector<std::string> argv(args.rbegin(), args.rend());
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (replay_cmd->parsed()) return replay(manifest_path, o_out->count() ? std::optional(out_dir) : std::nullopt, out);

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub == analyze ? "analyze " + kind : sub->get_name();
    json user = o_config->count() ? io::read_json_file(config_path, "config") : json::object();
    if (!user.is_object()) throw ConfigError("config", "configuration must be a JSON object");
    if (sub == scan_cmd && !spec_path.empty()) user["spec"] = io::read_json_file(spec_path, "spec");
    for (const auto& [key, value] : raw[sub->get_name()])
      if (sub->get_option("--" + [&] {
                std::string f = key;
                std::replace(f.begin(), f.end(), '_', '-');
                return f;
              }())->count())
        user[key] = parse_value(value);
    for (const auto& p : param_pairs) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("param", "--param expects key=value, got '" + p + "'");
      if (!user.contains("params") || !user["params"].is_object()) user["params"] = json::object();
      user["params"][p.substr(0, eq)] = parse_value(p.substr(eq + 1));
    }
    if (o_seed->count()) user["seed"] = parse_value(seed);
    if (o_threads->count()) user["threads"] = parse_value(threads);

    const json config = resolve_config(command, user);
    const std::string started = io::utc_timestamp();
    const Outcome o = execute(command, config);
    write_run(out_dir, command, config, o, started);
    out << o.summary;
    return o.exit_code;
  } catch (const ConfigError& e) {
    err << "error: " << e.key() << ": " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DynamicsError& e) {
    err << "analysis failed: " << e.what() << "\n";
    return kVerdictFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace chaoslab::cli
