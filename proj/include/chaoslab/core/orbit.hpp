#pragma once

#include "chaoslab/core/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaoslab {

enum class Termination { Completed, LocusHit, DomainEscape, Diverged, StepUnderflow };

std::string to_string(Termination t);

struct OrbitMeta {
  std::string model_id;
  std::map<std::string, double> params;
  Vector initial;
  std::string integrator;  // "rk4", "rk4-adaptive", "map"
  double step = 0.0;
  double tolerance = 0.0;
  std::optional<std::uint64_t> seed;
  Vector periods;  // per coordinate, 0 for non-angular axes
};

/// Time-stamped samples. For maps the time is the iteration index.
struct Orbit {
  std::vector<double> times;
  std::vector<State> states;
  OrbitMeta meta;
  Termination termination = Termination::Completed;
  std::string detail;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  const State& front() const { return states.front(); }
  const State& back() const { return states.back(); }
  bool completed() const { return termination == Termination::Completed; }
  /// Throws DynamicsError describing the termination unless completed.
  void require_completed() const;

  void push(double t, const State& s) {
    times.push_back(t);
    states.push_back(s);
  }
};

/// `t,c0,...,c{n-1}` header, one row per sample, 17 significant digits.
void write_orbit_csv(std::ostream& os, const Orbit& orbit);
std::string format_double(double v);

}  // namespace chaoslab
