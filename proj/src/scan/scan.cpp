#include "chaoslab/scan/scan.hpp"

#include "chaoslab/analysis/dimension.hpp"
#include "chaoslab/analysis/lyapunov.hpp"
#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/integrate.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/symbolic/kneading.hpp"
#include "chaoslab/verify/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

namespace chaoslab::scan {

const std::vector<std::string>& all_tags() {
  static const std::vector<std::string> tags{
      tag::kBlueSkyOrbit, tag::kHypothesisViolation, tag::kSolenoid, tag::kNotASolenoid,
      tag::kFixedPoint,   tag::kRotation,            tag::kLocked,   tag::kExpandingChaos,
      tag::kChaotic,      tag::kRegular,             tag::kDomainEscape, tag::kReductionInvalid};
  return tags;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ScanResult make_result(const std::string& family, std::vector<std::string> swept, std::vector<int> shape) {
  ScanResult r;
  r.family = family;
  r.swept = std::move(swept);
  r.shape = std::move(shape);
  r.code_version = CHAOSLAB_VERSION;
  return r;
}

// ---------------------------------------------------------------------------
// Circle part of the solid-torus map: c(theta) = m theta + g(theta) + omega + mu h_amp sin(2 pi theta)

double circle_value(const zoo::SolidTorusParams& p, double t) {
  return p.m * t + p.g.value(t) + p.omega + p.mu * p.h_amplitude * std::sin(kTwoPi * t);
}

double circle_derivative(const zoo::SolidTorusParams& p, double t) {
  return p.m + p.g.derivative(t) + p.mu * p.h_amplitude * kTwoPi * std::cos(kTwoPi * t);
}

bool equally_spaced_preimages(const zoo::SolidTorusParams& p) {
  return zoo::max_abs_derivative(p.g, 4096) == 0.0 && p.mu * p.h_amplitude == 0.0;
}

/// The |m| solutions of c(theta) = target mod 1, ordered by lift level.
std::vector<double> circle_preimages(const zoo::SolidTorusParams& p, double target) {
  const int am = std::abs(p.m);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(am));
  if (equally_spaced_preimages(p)) {
    const double shift = p.g.value(0.0) + p.omega;
    for (int j = 0; j < am; ++j) out.push_back(wrap((target - shift + j) / p.m, 1.0));
    return out;
  }
  const double c0 = circle_value(p, 0.0);
  const double sign = p.m > 0 ? 1.0 : -1.0;
  // Levels target + k strictly inside the lift's range over [0, 1).
  const double first = sign > 0 ? std::ceil(c0 - target) : std::floor(c0 - target);
  for (int j = 0; j < am; ++j) {
    const double level = target + first + sign * j;
    const auto G = [&](double t) { return sign * (circle_value(p, t) - level); };
    double a = 0.0, b = 1.0;
    if (G(a) >= 0.0) {
      out.push_back(0.0);
      continue;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (G(mid) < 0.0 ? a : b) = mid;
    }
    out.push_back(wrap(a, 1.0));
  }
  return out;
}

std::function<Vector(const Vector&, double)> fiber_map(const zoo::SolidTorusParams& p) {
  if (p.f) return p.f;
  return [p](const Vector& x, double t) {
    Vector e = Vector::Zero(x.size());
    e[0] = std::cos(kTwoPi * t);
    if (x.size() > 1) e[1] = std::sin(kTwoPi * t);
    return Vector(p.contraction * x + p.offset * e);
  };
}

/// Sampled Lipschitz constant of x -> f(x, theta) on the fiber disk.
double fiber_lipschitz(const std::function<Vector(const Vector&, double)>& f, int d, double r, double t) {
  double worst = 0.0;
  std::vector<Vector> probes{Vector::Zero(d)};
  for (int i = 0; i < d; ++i)
    for (double s : {-0.5, 0.5}) {
      Vector x = Vector::Zero(d);
      x[i] = s * r;
      probes.push_back(x);
    }
  for (const auto& x : probes) {
    Matrix J(d, d);
    for (int c = 0; c < d; ++c) {
      Vector xp = x, xm = x;
      const double h = 1e-6 * std::max(1.0, r);
      xp[c] += h;
      xm[c] -= h;
      J.col(c) = (f(xp, t) - f(xm, t)) / (2 * h);
    }
    worst = std::max(worst, J.jacobiSvd().singularValues()[0]);
  }
  return worst;
}

void check_solenoid_params(const zoo::SolidTorusParams& p) {
  if (std::abs(p.m) < 2) throw PreconditionError("solenoid check needs |m| >= 2");
  if (p.h) throw PreconditionError("solenoid check needs a fiber-preserving map (no custom h)");
  if (p.fiber_dim < 1 || !(p.fiber_radius > 0.0)) throw PreconditionError("invalid fiber");
}

}  // namespace

// ---------------------------------------------------------------------------
// Blue sky

double saddle_node_passage_time(double mu, double dt) {
  if (!(mu > 0.0)) throw PreconditionError("passage time needs mu > 0");
  zoo::SaddleNodeParams p;
  p.mu = mu;
  const SystemModel flow = zoo::make_saddle_node_flow(p);
  State s0 = State::Zero(flow.dimension);
  s0[1] = -1.0;
  StepSettings step;
  step.dt = dt;
  const double t_max = 10.0 * std::numbers::pi / std::sqrt(mu) + 10.0;
  const CrossingResult c = integrate_until_crossing(flow, s0, PlaneCrossing{1, 1.0, +1}, t_max, step);
  if (!c.found) throw DynamicsError("saddle-node passage did not reach z = 1");
  return c.time;
}

ScanResult blue_sky_scan(const zoo::CircleFunction& g, double omega, const std::vector<double>& mus,
                         const BlueSkySettings& st, int threads) {
  const double gmax = zoo::max_abs_derivative(g);
  if (!(gmax < 1.0)) throw PreconditionError("blue-sky scan needs max |g'| < 1");
  if (mus.empty()) throw PreconditionError("blue-sky scan needs at least one mu");
  for (double mu : mus)
    if (!(mu > 0.0)) throw PreconditionError("blue-sky scan needs mu > 0");
  const SystemModel circle = zoo::make_circle_family(0, g, omega);

  ScanResult r = make_result("blue_sky", {"mu"}, {static_cast<int>(mus.size())});
  r.points.resize(mus.size());
  // The circle map does not depend on mu: locate its attracting fixed points once.
  std::vector<double> limits;
  for (int k = 0; k < st.seeds; ++k) {
    State s = State::Constant(1, static_cast<double>(k) / st.seeds);
    for (int i = 0; i < st.iterations; ++i) s = circle.evaluate(s);
    const bool known = std::any_of(limits.begin(), limits.end(), [&](double l) {
      return std::abs(circular_difference(l, s[0], 1.0)) < 1e-9;
    });
    if (!known) limits.push_back(s[0]);
  }
  const double fixed = limits.front();
  const double fixed_residual = std::abs(circular_difference(circle.evaluate(State::Constant(1, fixed))[0], fixed, 1.0));

  parallel_for(mus.size(), threads, [&](std::size_t i) {
    ScanPoint& pt = r.points[i];
    pt.params["mu"] = mus[i];
    pt.diagnostics["max_abs_g_derivative"] = gmax;
    pt.diagnostics["attracting_fixed_points"] = static_cast<double>(limits.size());
    pt.diagnostics["fixed_point"] = fixed;
    pt.diagnostics["fixed_point_residual"] = fixed_residual;
    if (limits.size() != 1 || fixed_residual > 1e-9) {
      pt.tag = tag::kHypothesisViolation;
      return;
    }
    const double passage = saddle_node_passage_time(mus[i], st.dt);
    pt.diagnostics["passage_time"] = passage;
    pt.diagnostics["period"] = 1.0 * passage;  // one fixed point: one passage per period
    pt.diagnostics["asymptote"] = std::numbers::pi / std::sqrt(mus[i]);
    pt.tag = tag::kBlueSkyOrbit;
  });
  return r;
}

// ---------------------------------------------------------------------------
// Solenoid

double solenoid_derivative_margin(const zoo::SolidTorusParams& p, int samples) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) worst = std::min(worst, std::abs(circle_derivative(p, (i + 0.5) / samples)));
  return worst - 1.0;
}

FiberOverlap fiber_image_overlap(const zoo::SolidTorusParams& p, int samples) {
  check_solenoid_params(p);
  FiberOverlap out;
  const int am = std::abs(p.m);
  if (p.builtin() && p.fiber_dim >= 2 && equally_spaced_preimages(p)) {
    out.closed_form = true;
    out.slack = 2.0 * std::abs(p.offset) * std::sin(std::numbers::pi / am) - 2.0 * p.contraction * p.fiber_radius;
    out.disjoint = out.slack > 0.0;
    return out;
  }
  const auto f = fiber_map(p);
  const int d = p.fiber_dim;
  std::vector<std::vector<Vector>> centers(static_cast<std::size_t>(samples));
  out.slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double target = static_cast<double>(k) / samples;
    const auto pre = circle_preimages(p, target);
    std::vector<double> radius;
    for (double t : pre) {
      centers[k].push_back(f(Vector::Zero(d), t));
      radius.push_back(fiber_lipschitz(f, d, p.fiber_radius, t) * p.fiber_radius);
    }
    for (int i = 0; i < am; ++i)
      for (int j = i + 1; j < am; ++j) {
        const double s = (centers[k][i] - centers[k][j]).norm() - radius[i] - radius[j];
        if (s < out.slack) out.slack = s, out.witness_theta = target;
      }
  }
  // Between samples a center moves at most as far as it does from one sample to the next.
  double move = 0.0;
  for (int k = 0; k < samples; ++k) {
    const auto& a = centers[k];
    const auto& b = centers[(k + 1) % samples];
    for (const auto& c : b) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& e : a) nearest = std::min(nearest, (c - e).norm());
      move = std::max(move, nearest);
    }
  }
  out.slack -= move;
  out.disjoint = out.slack > 0.0;
  return out;
}

std::vector<Vector> fiber_section(const zoo::SolidTorusParams& p, double theta0, int depth) {
  check_solenoid_params(p);
  if (depth < 1) throw PreconditionError("section depth must be at least 1");
  const int am = std::abs(p.m);
  while (depth > 1 && std::pow(static_cast<double>(am), depth) > 65536.0) --depth;
  const auto f = fiber_map(p);
  // Branch angles level by level from the root; then the fiber centre x = 0 is
  // pushed back up through f, one point per leaf. Leaf i sits below node
  // i / |m|^(depth - k) of level k.
  std::vector<std::vector<double>> levels{{theta0}};
  for (int k = 0; k < depth; ++k) {
    std::vector<double> next;
    next.reserve(levels.back().size() * am);
    for (double t : levels.back())
      for (double s : circle_preimages(p, t)) next.push_back(s);
    levels.push_back(std::move(next));
  }
  std::vector<Vector> points(levels.back().size(), Vector::Zero(p.fiber_dim));
  for (int k = depth; k >= 1; --k) {
    const auto& angles = levels[k];
    const std::size_t group = points.size() / angles.size();
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = f(points[i], angles[i / group]);
  }
  return points;
}

ScanResult solenoid_birth_check(const zoo::SolidTorusParams& p, const std::vector<double>& contractions,
                                const SolenoidSettings& st, int threads) {
  check_solenoid_params(p);
  if (contractions.empty()) throw PreconditionError("solenoid check needs at least one contraction value");
  ScanResult r = make_result("solenoid", {"contraction"}, {static_cast<int>(contractions.size())});
  r.points.resize(contractions.size());
  parallel_for(contractions.size(), threads, [&](std::size_t i) {
    zoo::SolidTorusParams q = p;
    q.contraction = contractions[i];
    if (!(q.contraction >= 0.0 && q.contraction < 1.0))
      throw PreconditionError("contraction must lie in [0, 1)");
    ScanPoint& pt = r.points[i];
    pt.params["contraction"] = q.contraction;
    const double margin = solenoid_derivative_margin(q, st.theta_samples);
    pt.diagnostics["derivative_margin"] = margin;
    bool disjoint = false;
    if (margin > 0.0) {
      const FiberOverlap ov = fiber_image_overlap(q, st.theta_samples);
      disjoint = ov.disjoint;
      pt.diagnostics["overlap_slack"] = ov.slack;
      pt.diagnostics["closed_form"] = ov.closed_form ? 1.0 : 0.0;
      if (!ov.disjoint) pt.diagnostics["witness_theta"] = ov.witness_theta;
    }
    const auto section = fiber_section(q, 0.0, st.section_depth);
    double dim = kNaN;
    if (section.size() >= 10000) {
      const BoxDimensionResult bd = box_counting_dimension(section);
      dim = bd.dimension;
      pt.diagnostics["section_r_squared"] = bd.r_squared;
    }
    pt.diagnostics["section_points"] = static_cast<double>(section.size());
    pt.diagnostics["section_dimension"] = dim;
    const bool dim_ok = dim > st.dimension_lo && dim < st.dimension_hi;
    pt.tag = margin > 0.0 && disjoint && dim_ok ? tag::kSolenoid : tag::kNotASolenoid;
    if (margin <= 0.0) pt.text["note"] = "derivative condition fails";
    else if (!disjoint) pt.text["note"] = "fiber images overlap";
    else if (!dim_ok) pt.text["note"] = "section dimension outside (0, 1)";
  });
  return r;
}

// ---------------------------------------------------------------------------
// Circle family

ScanResult circle_family_scan(int m, const zoo::CircleFunction& g, const std::vector<double>& omegas,
                              const CircleScanSettings& st, int threads) {
  if (omegas.empty()) throw PreconditionError("circle scan needs at least one omega");
  if (st.iterations < 1 || st.transient < 0) throw PreconditionError("invalid iteration counts");
  const double gmax = zoo::max_abs_derivative(g);
  ScanResult r = make_result("circle", {"omega"}, {static_cast<int>(omegas.size())});
  r.points.resize(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    ScanPoint& pt = r.points[i];
    const double omega = omegas[i];
    pt.params["omega"] = omega;
    const SystemModel map = zoo::make_circle_family(m, g, omega);
    auto rng = make_rng(st.seed, i);
    State s = State::Constant(1, uniform(rng, 0.0, 1.0));
    if (m == 0 && gmax < 1.0) {
      // Contraction: iterate to the fixed point.
      for (int k = 0; k < st.transient + st.iterations; ++k) {
        const State next = map.evaluate(s);
        const bool done = std::abs(circular_difference(next[0], s[0], 1.0)) < 1e-14;
        s = next;
        if (done) break;
      }
      pt.tag = tag::kFixedPoint;
      pt.diagnostics["fixed_point"] = s[0];
      pt.diagnostics["lyapunov"] = std::log(std::abs(g.derivative(s[0])));
      return;
    }
    for (int k = 0; k < st.transient; ++k) s = map.evaluate(s);
    double lift = s[0], sum = 0.0;
    const double start = lift;
    for (int k = 0; k < st.iterations; ++k) {
      sum += std::log(std::abs(m + g.derivative(wrap(lift, 1.0))));
      lift = map.rule(State::Constant(1, wrap(lift, 1.0)))[0] + (lift - wrap(lift, 1.0)) * m;
    }
    const double lambda = sum / st.iterations;
    pt.diagnostics["lyapunov"] = lambda;
    if (m == 1) pt.diagnostics["rotation_number"] = (lift - start) / st.iterations;
    if (lambda > st.zero_tolerance) pt.tag = tag::kExpandingChaos;
    else if (lambda < -st.zero_tolerance) pt.tag = tag::kLocked;
    else pt.tag = tag::kRotation;
  });
  return r;
}

// ---------------------------------------------------------------------------
// Lorenz family

ScanResult lorenz_family_scan(const zoo::GeomLorenzParams& base, const std::vector<double>& mu1,
                              const std::vector<double>& mu2, const LorenzScanSettings& st, int threads) {
  if (mu1.empty() || mu2.empty()) throw PreconditionError("Lorenz scan needs a nonempty grid");
  {
    const auto report = verify::check_lorenz_conditions(zoo::make_geometric_lorenz(base), verify::Grid{});
    if (!report.all_hold()) throw PreconditionError("base parameters do not satisfy the Lorenz-map conditions");
  }
  ScanResult r = make_result("lorenz", {"mu1", "mu2"}, {static_cast<int>(mu1.size()), static_cast<int>(mu2.size())});
  r.points.resize(mu1.size() * mu2.size());
  parallel_for(r.points.size(), threads, [&](std::size_t idx) {
    ScanPoint& pt = r.points[idx];
    const double a = mu1[idx / mu2.size()], b = mu2[idx % mu2.size()];
    pt.params["mu1"] = a;
    pt.params["mu2"] = b;
    zoo::GeomLorenzParams q = base;
    q.y1s += a;
    q.y2s += b;
    const SystemModel model = zoo::make_geometric_lorenz(q);

    // Largest exponent of the planar map from a seeded start.
    LyapunovSettings ls;
    ls.duration = static_cast<double>(st.iterations);
    ls.transient = static_cast<double>(st.transient);
    ls.exponents = 1;
    bool escaped = false;
    double lambda = kNaN;
    auto rng = make_rng(st.seed, idx);
    for (int attempt = 0; attempt < 5; ++attempt) {
      State s(2);
      s << uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0);
      if (model.near_locus(s)) continue;
      const LyapunovResult lr = lyapunov_spectrum(model, s, ls);
      if (lr.termination == Termination::DomainEscape) {
        escaped = true;
        break;
      }
      if (lr.termination == Termination::Completed) {
        lambda = lr.exponents.front();
        break;
      }
    }
    pt.diagnostics["lambda1"] = lambda;
    if (st.verify) {
      const auto report = verify::check_lorenz_conditions(model, verify::Grid{});
      pt.diagnostics["conditions_hold"] = report.all_hold() ? 1.0 : 0.0;
    }
    if (escaped) {
      pt.tag = tag::kDomainEscape;
      return;
    }
    symbolic::IntervalMap1D<double> G;
    try {
      G = symbolic::reduce_to_1d(model);
    } catch (const ReductionInvalidError& e) {
      pt.tag = tag::kReductionInvalid;
      pt.text["note"] = e.what();
      return;
    }
    pt.diagnostics["fit_residual"] = G.fit_residual;
    if (G.escapes) {
      pt.tag = tag::kDomainEscape;
      return;
    }
    bool full = false;
    try {
      full = symbolic::verify_two_full_branches(G);
    } catch (const PreconditionError&) {
      full = false;
    }
    pt.diagnostics["full_branches"] = full ? 1.0 : 0.0;
    pt.diagnostics["entropy"] = symbolic::build_transition_matrix(G, st.entropy_depth).entropy;
    if (st.kneading) {
      const auto k = symbolic::kneading_invariant(G, st.kneading_length);
      pt.text["kneading_plus"] = k.plus;
      pt.text["kneading_minus"] = k.minus;
    }
    pt.tag = lambda > st.chaos_threshold ? tag::kChaotic : tag::kRegular;
  });
  return r;
}

}  // namespace chaoslab::scan
