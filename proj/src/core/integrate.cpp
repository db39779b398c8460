#include "chaoslab/core/integrate.hpp"

#include "chaoslab/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chaoslab {
namespace {

void check_flow_preconditions(const SystemModel& model, const State& s0,
                              const StepSettings& step) {
  if (!model.is_flow()) throw PreconditionError("model '" + model.id + "' is not a flow");
  if (s0.size() != model.dimension)
    throw PreconditionError("initial state dimension does not match model '" + model.id + "'");
  if (!(step.dt > 0.0) || !(step.tolerance > 0.0))
    throw PreconditionError("step size and tolerance must be positive");
}

OrbitMeta flow_meta(const SystemModel& model, const State& s0, const StepSettings& step) {
  OrbitMeta meta;
  meta.model_id = model.id;
  meta.params = model.params;
  meta.initial = s0;
  meta.integrator = step.adaptive ? "rk4-adaptive" : "rk4";
  meta.step = step.dt;
  meta.tolerance = step.tolerance;
  meta.periods = model.domain.periods();
  return meta;
}

bool escaped(const Vector& s, double radius) { return !s.allFinite() || s.norm() > radius; }

}  // namespace

Orbit integrate_flow(const SystemModel& model, const State& s0, double t_end,
                     const StepSettings& step) {
  check_flow_preconditions(model, s0, step);
  if (!(t_end > 0.0)) throw PreconditionError("t_end must be positive");
  if (!model.domain.contains(s0)) throw PreconditionError("initial state outside the domain");

  Orbit orbit;
  orbit.meta = flow_meta(model, s0, step);
  const auto field = [&](const Vector& y) { return model.rule(y); };

  State y = s0;
  model.domain.reduce(y);
  double t = 0.0;
  double h = step.dt;
  long accepted = 0;
  orbit.push(t, y);

  while (t < t_end) {
    const bool last = t + h >= t_end * (1.0 - 1e-15);
    const double hs = last ? t_end - t : h;
    State next;
    if (step.adaptive) {
      const State big = rk4_step<double>(field, y, hs);
      const State half = rk4_step<double>(field, y, hs / 2);
      const State fine = rk4_step<double>(field, half, hs / 2);
      const double err = (fine - big).lpNorm<Eigen::Infinity>() / 15.0;
      if (err > step.tolerance && hs > step.min_dt) {
        h = std::max(step.min_dt, hs * std::max(0.2, 0.9 * std::pow(step.tolerance / err, 0.2)));
        if (h <= step.min_dt && err > step.tolerance) {
          orbit.termination = Termination::StepUnderflow;
          orbit.detail = "step size fell below min_dt at t=" + format_double(t);
          return orbit;
        }
        continue;
      }
      next = fine + (fine - big) / 15.0;
      if (err > 0.0 && !last)
        h = std::min(step.dt, hs * std::min(5.0, 0.9 * std::pow(step.tolerance / err, 0.2)));
    } else {
      next = rk4_step<double>(field, y, hs);
    }
    model.domain.reduce(next);
    t = last ? t_end : t + hs;
    if (escaped(next, step.escape_radius)) {
      orbit.termination = Termination::Diverged;
      orbit.detail = "state norm exceeded escape radius at t=" + format_double(t);
      return orbit;
    }
    y = next;
    ++accepted;
    if (last || (step.record_stride > 0 && accepted % step.record_stride == 0))
      orbit.push(t, y);
  }
  return orbit;
}

CrossingResult integrate_until_crossing(const SystemModel& model, const State& s0,
                                        const PlaneCrossing& plane, double t_max,
                                        const StepSettings& step) {
  check_flow_preconditions(model, s0, step);
  if (plane.coordinate < 0 || plane.coordinate >= model.dimension)
    throw PreconditionError("crossing plane coordinate out of range");
  const auto field = [&](const Vector& y) { return model.rule(y); };
  const auto side = [&](const Vector& y) { return y[plane.coordinate] - plane.value; };
  const auto crosses = [&](double before, double after) {
    if (plane.direction > 0) return before < 0.0 && after >= 0.0;
    if (plane.direction < 0) return before > 0.0 && after <= 0.0;
    return (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0);
  };

  CrossingResult result;
  State y = s0;
  double t = 0.0;
  while (t < t_max) {
    const double h = std::min(step.dt, t_max - t);
    State next = rk4_step<double>(field, y, h);
    if (escaped(next, step.escape_radius)) {
      result.termination = Termination::Diverged;
      result.time = t;
      result.state = y;
      return result;
    }
    if (crosses(side(y), side(next))) {
      double lo = 0.0, hi = h;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, t); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (crosses(side(y), side(rk4_step<double>(field, y, mid))))
          hi = mid;
        else
          lo = mid;
      }
      result.found = true;
      result.time = t + hi;
      result.state = rk4_step<double>(field, y, hi);
      model.domain.reduce(result.state);
      return result;
    }
    model.domain.reduce(next);
    y = next;
    t += h;
  }
  result.time = t;
  result.state = y;
  return result;
}

Orbit iterate_map(const SystemModel& model, const State& s0, long n, int record_stride) {
  if (!model.is_map()) throw PreconditionError("model '" + model.id + "' is not a map");
  if (s0.size() != model.dimension)
    throw PreconditionError("initial state dimension does not match model '" + model.id + "'");
  if (n < 0) throw PreconditionError("iteration count must be non-negative");

  Orbit orbit;
  orbit.meta.model_id = model.id;
  orbit.meta.params = model.params;
  orbit.meta.initial = s0;
  orbit.meta.integrator = "map";
  orbit.meta.step = 1.0;
  orbit.meta.periods = model.domain.periods();

  State s = s0;
  model.domain.reduce(s);
  orbit.push(0.0, s);
  if (model.near_locus(s)) {
    orbit.termination = Termination::LocusHit;
    orbit.detail = "initial state inside the locus guard band";
    return orbit;
  }
  for (long k = 1; k <= n; ++k) {
    State next = model.evaluate(s);
    const bool record = k == n || (record_stride > 0 && k % record_stride == 0);
    if (!model.domain.contains(next)) {
      orbit.termination = Termination::DomainEscape;
      orbit.detail = "iterate " + std::to_string(k) + " left the domain at (";
      for (long i = 0; i < next.size(); ++i)
        orbit.detail += (i ? ", " : "") + format_double(next[i]);
      orbit.detail += ")";
      if (orbit.times.back() != k - 1.0)
        orbit.push(static_cast<double>(k - 1), s);
      return orbit;
    }
    s = next;
    if (model.near_locus(s)) {
      orbit.push(static_cast<double>(k), s);
      orbit.termination = Termination::LocusHit;
      orbit.detail = "iterate " + std::to_string(k) + " landed in the locus guard band";
      return orbit;
    }
    if (record) orbit.push(static_cast<double>(k), s);
  }
  return orbit;
}

}  // namespace chaoslab
