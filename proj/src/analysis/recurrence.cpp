#include "chaoslab/analysis/recurrence.hpp"

#include "chaoslab/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chaoslab {

double RecurrenceResult::max_gap() const { return gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end()); }

double RecurrenceResult::mean_gap() const {
  return gaps.empty() ? 0.0 : std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
}

std::vector<double> RecurrenceResult::distinct_gaps(double tol) const {
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (double g : sorted)
    if (out.empty() || g - out.back() > tol * std::max(1.0, std::abs(g))) out.push_back(g);
  return out;
}

RecurrenceResult recurrence_times(const Orbit& orbit, const State& center, double radius, const Domain& domain) {
  if (!(radius > 0.0)) throw PreconditionError("recurrence radius must be positive");
  if (center.size() != domain.dimension()) throw PreconditionError("center dimension does not match the domain");
  RecurrenceResult out;
  bool inside_before = false;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const bool inside = domain.difference(orbit.states[i], center).norm() <= radius;
    if (inside && !inside_before) out.entry_times.push_back(orbit.times[i]);
    inside_before = inside;
  }
  if (out.entry_times.size() < 2)
    throw InsufficientRecurrenceError("orbit visits the ball " + std::to_string(out.entry_times.size()) +
                                      " time(s); need at least 2");
  for (std::size_t i = 1; i < out.entry_times.size(); ++i)
    out.gaps.push_back(out.entry_times[i] - out.entry_times[i - 1]);
  return out;
}

}  // namespace chaoslab
