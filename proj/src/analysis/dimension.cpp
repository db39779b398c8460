#include "chaoslab/analysis/dimension.hpp"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace chaoslab {
namespace {

/// Occupied boxes at side L / 2^level, counted by sorting packed box keys.
long count_boxes(const std::vector<Vector>& pts, const Vector& lo, double side, int level) {
  const int n = static_cast<int>(lo.size());
  const double cells = std::ldexp(1.0, level);
  const auto index = [&](const Vector& x, int i) {
    const double u = (x[i] - lo[i]) / side * cells;
    return std::min(static_cast<std::int64_t>(u), static_cast<std::int64_t>(cells) - 1);
  };
  if (n * level <= 63) {
    std::vector<std::uint64_t> packed(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      std::uint64_t key = 0;
      for (int i = 0; i < n; ++i) key = (key << level) | static_cast<std::uint64_t>(index(pts[p], i));
      packed[p] = key;
    }
    std::sort(packed.begin(), packed.end());
    return static_cast<long>(std::unique(packed.begin(), packed.end()) - packed.begin());
  }
  std::vector<std::vector<std::int64_t>> keys(pts.size(), std::vector<std::int64_t>(n));
  for (std::size_t p = 0; p < pts.size(); ++p)
    for (int i = 0; i < n; ++i) keys[p][i] = index(pts[p], i);
  std::sort(keys.begin(), keys.end());
  return static_cast<long>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

BoxDimensionResult box_counting_dimension(const std::vector<Vector>& points, const ScaleRange& range,
                                          int threads) {
  if (points.size() < 10000) throw PreconditionError("box counting needs at least 10^4 points");
  if (range.min_level < 0) throw PreconditionError("scale levels must be non-negative");
  const int n = static_cast<int>(points.front().size());
  Vector lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    if (p.size() != n) throw PreconditionError("points have mixed dimensions");
    if (!p.allFinite()) throw PreconditionError("points must be finite");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double side = (hi - lo).maxCoeff();
  if (!(side > 0.0)) throw PreconditionError("point cloud has zero extent");

  BoxDimensionResult out;
  int max_level = range.max_level;
  if (max_level == 0) {
    // Deepest level before the count saturates against the sample size.
    const long cap = static_cast<long>(points.size() / 10);
    max_level = range.min_level;
    while (max_level < 40 && count_boxes(points, lo, side, max_level + 1) <= cap) ++max_level;
  }
  if (max_level - range.min_level + 1 < 4) throw PreconditionError("box counting needs at least four scales");

  const int levels = max_level - range.min_level + 1;
  out.counts.assign(static_cast<std::size_t>(levels), 0);
  out.box_sizes.assign(static_cast<std::size_t>(levels), 0.0);
  parallel_for(static_cast<std::size_t>(levels), threads, [&](std::size_t i) {
    const int level = range.min_level + static_cast<int>(i);
    out.box_sizes[i] = std::ldexp(side, -level);
    out.counts[i] = count_boxes(points, lo, side, level);
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < levels; ++i) {
    const double x = -std::log(out.box_sizes[i]);
    const double y = std::log(static_cast<double>(out.counts[i]));
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  const double m = levels;
  const double cxx = sxx - sx * sx / m, cxy = sxy - sx * sy / m, cyy = syy - sy * sy / m;
  out.dimension = cxy / cxx;
  out.r_squared = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 0.0;
  out.degenerate = out.r_squared < 0.98;
  return out;
}

nlohmann::json to_json(const BoxDimensionResult& r) {
  return {{"dimension", r.dimension},
          {"r_squared", r.r_squared},
          {"degenerate", r.degenerate},
          {"box_sizes", r.box_sizes},
          {"counts", r.counts}};
}

}  // namespace chaoslab
