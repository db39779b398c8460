#pragma once

#include "chaoslab/core/types.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace chaoslab {

/// Dyadic box sides L / 2^level for level in [min_level, max_level], with L
/// the largest side of the bounding box. max_level = 0 picks the deepest
/// level whose box count stays below a tenth of the point count.
struct ScaleRange {
  int min_level = 1;
  int max_level = 0;
};

struct BoxDimensionResult {
  double dimension = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;  // r^2 < 0.98
  std::vector<double> box_sizes;
  std::vector<long> counts;
};

/// Least-squares slope of log N(h) against log(1/h). Needs 10^4 points and
/// four scales.
BoxDimensionResult box_counting_dimension(const std::vector<Vector>& points, const ScaleRange& range = {},
                                          int threads = 1);

nlohmann::json to_json(const BoxDimensionResult& r);

}  // namespace chaoslab
