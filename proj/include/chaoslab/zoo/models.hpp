#pragma once

#include "chaoslab/core/model.hpp"

#include <functional>
#include <optional>
#include <string>

namespace chaoslab::zoo {

// ---------------------------------------------------------------------------
// Lorenz system  x' = sigma (y - x),  y' = r x - y - x z,  z' = x y - b z
// ---------------------------------------------------------------------------

struct LorenzParams {
  double sigma = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;
};

SystemModel make_lorenz(const LorenzParams& p = {});

// ---------------------------------------------------------------------------
// Saddle-node normal form near a torus:  y' = C y,  z' = mu + z^2,  theta' = Omega
// Coordinates are ordered (y, z, theta); theta lives on the unit torus.
// ---------------------------------------------------------------------------

struct SaddleNodeParams {
  double mu = 0.01;
  Matrix C = Matrix::Constant(1, 1, -1.0);
  Vector Omega = Vector::Constant(1, 1.0);
};

SystemModel make_saddle_node_flow(const SaddleNodeParams& p);

/// z-coordinates of the equilibria of z' = mu + z^2 (y = 0 on all of them).
std::vector<double> saddle_node_equilibria(double mu);

// ---------------------------------------------------------------------------
// Torus maps  theta -> A theta (+ g(theta)) mod 1
// ---------------------------------------------------------------------------

/// Hyperbolic-or-not automorphism; rejects |det A| != 1.
SystemModel make_torus_automorphism(const IntMatrix& A);

/// 1-periodic perturbation of a torus endomorphism.
struct TorusPerturbation {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;

  explicit operator bool() const { return static_cast<bool>(value); }
};

/// Covering map of the torus (|det A| >= 1).
SystemModel make_torus_endomorphism(const IntMatrix& A, const TorusPerturbation& g = {});

SystemModel make_cat_map();
SystemModel make_doubling_map();

// ---------------------------------------------------------------------------
// Circle maps  theta -> m theta + g(theta) + omega mod 1
// ---------------------------------------------------------------------------

struct CircleFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::string description;
  double amplitude = 0.0;  // of the built-in sine family; 0 for custom

  static CircleFunction zero();
  /// amplitude * sin(2 pi theta)
  static CircleFunction sine(double amplitude);
};

/// Dense-sampling estimate of max |g'| over one period.
double max_abs_derivative(const CircleFunction& g, int samples = 100000);

SystemModel make_circle_family(int m, const CircleFunction& g, double omega);

// ---------------------------------------------------------------------------
// Solid-torus map  x -> f(x, theta),  theta -> m theta + g(theta) + omega + h(x, theta)
// on D^d x S^1. Coordinates are ordered (x_1..x_d, theta).
//
// The built-in family is f = contraction * x + offset * e(theta) with
// e(theta) = (cos 2 pi theta, sin 2 pi theta, 0, ...) and
// h = mu * h_amplitude * sin 2 pi theta.
// ---------------------------------------------------------------------------

struct SolidTorusParams {
  int m = 2;
  double omega = 0.0;
  CircleFunction g = CircleFunction::zero();
  double mu = 0.0;
  int fiber_dim = 2;
  double fiber_radius = 1.0;
  double contraction = 0.2;
  double offset = 0.25;
  double h_amplitude = 0.0;
  /// Optional replacements for the built-in f and h (finite-difference Jacobian).
  std::function<Vector(const Vector& x, double theta)> f;
  std::function<double(const Vector& x, double theta)> h;

  bool builtin() const { return !f && !h; }
};

SystemModel make_solid_torus_map(const SolidTorusParams& p);

// ---------------------------------------------------------------------------
// Geometric Lorenz return map on D = {|x| <= 1, |y| < 2} minus S = {y = 0}:
//   y > 0:  x -> x1s + phi1(x,y) y^alpha,     y -> y1s + psi1(x,y) y^alpha
//   y < 0:  x -> x2s + phi2(x,y) (-y)^alpha,  y -> y2s + psi2(x,y) (-y)^alpha
// phi1 tends to A1 and psi2 to A2. Unset handles default to constants:
// phi1 = A1, psi2 = A2 and the mirrored phi2 = -A1, psi1 = -A2, which makes
// the map odd whenever (x2s, y2s) = -(x1s, y1s).
// ---------------------------------------------------------------------------

struct CorrectionHandle {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dx;  // may be empty
  std::function<double(double, double)> dy;  // may be empty

  static CorrectionHandle constant(double c);
  bool differentiable() const { return dx && dy; }
};

struct GeomLorenzParams {
  double x1s = 0.75, x2s = -0.75;
  double y1s = -0.8, y2s = 0.8;
  double A1 = 0.2, A2 = -1.6;
  double alpha = 0.8;
  std::optional<CorrectionHandle> phi1, phi2, psi1, psi2;
};

SystemModel make_geometric_lorenz(const GeomLorenzParams& p = {});

/// Linear-branch Lorenz-type map (the alpha -> 1 limit):
///   y >= 0: (x1s + fx x + fy y, y1s + gx x + gy y)
///   y <  0: (x2s + fx x + fy y, y2s + gx x + gy y)
struct PiecewiseLinearLorenzParams {
  double x1s = 0.6, x2s = -0.6;
  double y1s = -1.0, y2s = 1.0;
  double fx = 0.4, fy = 0.0;
  double gx = 0.0, gy = 2.0;
};

SystemModel make_piecewise_linear_lorenz(const PiecewiseLinearLorenzParams& p = {});

// ---------------------------------------------------------------------------
// Saddle-focus return map on Pi = {|x| <= 1, phi in [0, 2 pi), |z| <= 1}:
//   x   -> a |x|^rho cos(Omega ln|x| + phi)
//   phi -> b |x|^rho sin(Omega ln|x| + phi)
//   z   -> (c + d z |x|^eta) sign x
// ---------------------------------------------------------------------------

struct WildMapParams {
  double rho = 0.4;
  double eta = 0.5;
  double a = 0.9, b = 3.0, c = 0.5, d = 0.1;
  double Omega = 1.0;
};

SystemModel make_wild_map(const WildMapParams& p = {});

}  // namespace chaoslab::zoo
