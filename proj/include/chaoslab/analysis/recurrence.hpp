#pragma once

#include "chaoslab/core/model.hpp"
#include "chaoslab/core/orbit.hpp"

#include <vector>

namespace chaoslab {

struct RecurrenceResult {
  std::vector<double> entry_times;  // first sample of each visit to the ball
  std::vector<double> gaps;         // differences of successive entry times

  double max_gap() const;
  double mean_gap() const;
  /// Gaps grouped with relative tolerance `tol`.
  std::vector<double> distinct_gaps(double tol = 1e-9) const;
};

/// Re-entry times of the orbit into the closed ball of `radius` around
/// `center` (Euclidean, shortest way round on angular axes of `domain`).
/// Throws InsufficientRecurrenceError on fewer than two visits.
RecurrenceResult recurrence_times(const Orbit& orbit, const State& center, double radius,
                                  const Domain& domain);

}  // namespace chaoslab
