#include "chaoslab/core/orbit.hpp"

#include "chaoslab/core/errors.hpp"

#include <cstdio>
#include <ostream>

namespace chaoslab {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::LocusHit: return "locus-hit";
    case Termination::DomainEscape: return "domain-escape";
    case Termination::Diverged: return "diverged";
    case Termination::StepUnderflow: return "step-underflow";
  }
  return "unknown";
}

void Orbit::require_completed() const {
  if (!completed())
    throw DynamicsError("orbit terminated early (" + to_string(termination) + "): " + detail);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_orbit_csv(std::ostream& os, const Orbit& orbit) {
  const long n = orbit.empty() ? 0 : orbit.front().size();
  os << 't';
  for (long i = 0; i < n; ++i) os << ",c" << i;
  os << '\n';
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    os << format_double(orbit.times[k]);
    for (long i = 0; i < n; ++i) os << ',' << format_double(orbit.states[k][i]);
    os << '\n';
  }
}

}  // namespace chaoslab
