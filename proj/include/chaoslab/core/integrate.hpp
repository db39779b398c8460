#pragma once

#include "chaoslab/core/model.hpp"
#include "chaoslab/core/orbit.hpp"

namespace chaoslab {

struct StepSettings {
  double dt = 1e-2;
  double tolerance = 1e-8;  // local error target when adaptive
  bool adaptive = false;
  double min_dt = 1e-12;
  double escape_radius = 1e6;
  int record_stride = 1;  // 0 records only the endpoints
};

/// One classical fourth-order Runge-Kutta step of y' = f(y).
template <typename Scalar, typename Field>
VectorX<Scalar> rk4_step(Field&& f, const VectorX<Scalar>& y, Scalar h) {
  const VectorX<Scalar> k1 = f(y);
  const VectorX<Scalar> k2 = f((y + (h / 2) * k1).eval());
  const VectorX<Scalar> k3 = f((y + (h / 2) * k2).eval());
  const VectorX<Scalar> k4 = f((y + h * k3).eval());
  return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

/// Integrates a flow over [0, t_end]; the last step is shortened to land on
/// t_end exactly. Angular coordinates are reduced after every step.
Orbit integrate_flow(const SystemModel& model, const State& s0, double t_end,
                     const StepSettings& step = {});

/// Plane {s[coordinate] == value}, crossed in `direction` (+1, -1 or 0 for any).
struct PlaneCrossing {
  int coordinate = 0;
  double value = 0.0;
  int direction = +1;
};

struct CrossingResult {
  bool found = false;
  double time = 0.0;
  State state;
  Termination termination = Termination::Completed;
};

/// Integrates until the first crossing of `plane` (or t_max). The crossing is
/// located by bisection on the length of the final RK4 step.
CrossingResult integrate_until_crossing(const SystemModel& model, const State& s0,
                                        const PlaneCrossing& plane, double t_max,
                                        const StepSettings& step = {});

/// n iterations of a map. Stops early (and says why in `termination`) when an
/// iterate falls within the guard band of the locus or leaves the domain.
Orbit iterate_map(const SystemModel& model, const State& s0, long n, int record_stride = 1);

}  // namespace chaoslab
