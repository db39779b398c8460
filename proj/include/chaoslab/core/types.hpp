#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace chaoslab {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using IntMatrix = MatrixX<long>;

/// A point of phase space. Angular components live in [0, period).
using State = Vector;

/// One coordinate axis of a model's domain.
struct Axis {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double period = 0.0;  // > 0 marks an angular coordinate on [0, period)

  bool angular() const { return period > 0.0; }
};

/// Reduce x into [0, period). Never returns `period` itself.
inline double wrap(double x, double period) {
  double r = x - period * std::floor(x / period);
  if (r >= period || r < 0.0) r = 0.0;
  return r;
}

/// Signed distance on a circle of the given period, in (-period/2, period/2].
inline double circular_difference(double a, double b, double period) {
  double d = wrap(a - b, period);
  return d > 0.5 * period ? d - period : d;
}

struct Domain {
  std::vector<Axis> axes;

  static Domain box(const std::vector<std::pair<double, double>>& bounds);
  static Domain torus(int dim, double period = 1.0);
  static Domain unbounded(int dim);

  int dimension() const { return static_cast<int>(axes.size()); }
  bool contains(const Vector& s) const;
  bool has_angles() const;
  void reduce(Vector& s) const;
  Vector periods() const;
  /// Coordinate-wise difference a-b, shortest way round on angular axes.
  Vector difference(const Vector& a, const Vector& b) const;
};

/// Codimension-1 discontinuity set {s[coordinate] == value}.
struct Locus {
  int coordinate = 0;
  double value = 0.0;

  double distance(const Vector& s) const { return std::abs(s[coordinate] - value); }
};

}  // namespace chaoslab
