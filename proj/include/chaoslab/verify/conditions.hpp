#pragma once

#include "chaoslab/core/model.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace chaoslab::verify {

/// Sampling settings shared by the sup-norm checks.
///
/// Each axis gets n + 1 equally spaced values (n for periodic axes), so
/// doubling n nests the previous grid. Along the locus coordinate values with
/// |v - locus| < delta are dropped and replaced by the geometric ladder
/// locus +- delta * 2^j.
struct Grid {
  int n = 64;
  double delta = 1e-4;
  double margin = 1e-6;
  int sequence_length = 20;  // limit checks along |x| = 2^-k, k = 1..K
  double limit_tolerance = 1e-3;
  int threads = 1;
};

struct ConditionResult {
  std::string id;
  bool holds = false;
  double witness_value = 0.0;
  Vector witness_point;
  std::string note;
};

struct ConditionReport {
  std::string subject;
  std::vector<ConditionResult> conditions;
  int grid_n = 0;
  double grid_delta = 0.0;
  std::map<std::string, double> derived;
  std::map<std::string, std::vector<double>> series;
  std::vector<std::string> flags;

  bool all_hold() const;
  bool has(const std::string& id) const;
  const ConditionResult& at(const std::string& id) const;
};

/// One object per condition:
/// {condition, holds, witness_value, witness_point, grid:{n, delta}, derived, ...}.
nlohmann::json to_json(const ConditionReport& report);

// ---------------------------------------------------------------------------
// Matrix and expansion tests
// ---------------------------------------------------------------------------

/// Sub-checks "integer", "unimodular" and "hyperbolic" (no eigenvalue within
/// 1e-9 of the unit circle).
ConditionReport check_anosov_matrix(const Matrix& A);
ConditionReport check_anosov_matrix(const IntMatrix& A);

/// Sampled sup of ||(G')^-1|| over the torus; "expansion" holds iff it stays
/// below 1 - margin.
ConditionReport check_expansion(const SystemModel& map, const Grid& grid = {});

// ---------------------------------------------------------------------------
// Lorenz-type return maps (x, y) with discontinuity at y = 0
// ---------------------------------------------------------------------------

/// Sampled sups ||(g_y)^-1||, ||f_x||, ||g_x|| and ||(g_y)^-1 f_y||.
struct LorenzNorms {
  double gy_inv = 0.0;
  double fx = 0.0;
  double gx = 0.0;
  double gy_inv_fy = 0.0;
};

/// Conditions "a" (||f_x|| < 1), "b" (1 - ||g_y^-1|| ||f_x|| > 2 sqrt(...)),
/// "c" (||g_y^-1|| < 1) and "d" (product inequality), sampled on
/// |x| <= 1, delta <= |y| <= 1. Derived values carry the four sups and, when
/// everything holds, q and q_squared.
ConditionReport check_lorenz_conditions(const SystemModel& map, const Grid& grid = {});

LorenzNorms lorenz_norms(const ConditionReport& report);

enum class QVariant {
  AsPrinted,  // radicand 1 - a^2 b - 4 a c d
  Squared,    // radicand (1 - a b)^2 - 4 a c d
};

/// q = (1 + ab + sqrt(radicand)) / (2a) with a = ||g_y^-1||, b = ||f_x||.
/// Throws PreconditionError when a >= 1 and ConditionInconsistencyError when
/// the radicand is negative or q <= 1.
double compute_q(const LorenzNorms& norms, QVariant variant = QVariant::AsPrinted);

/// As above; additionally refuses reports in which any condition failed.
double compute_q(const ConditionReport& report, QVariant variant = QVariant::AsPrinted);

// ---------------------------------------------------------------------------
// Saddle-focus exponents
// ---------------------------------------------------------------------------

struct SaddleFocusExponents {
  double gamma = 1.0;
  double lambda = 0.4;
  double omega = 1.0;
  std::vector<double> alphas;  // real parts of the remaining stable exponents
};

/// Sub-checks "ordering" (gamma > 0, 0 < lambda < Re alpha_j), "rotation"
/// (omega != 0), "gap" (gamma > 2 lambda) and "rho" (lambda / gamma < 1/2).
ConditionReport check_saddle_focus_gap(const SaddleFocusExponents& e);

// ---------------------------------------------------------------------------
// Pseudo-hyperbolicity of maps (x, phi, z) -> (g(x, phi, z), f(x, phi, z))
// ---------------------------------------------------------------------------

/// With g_u = dg/d(x, phi):
///   D = g_u^-1,  C = D dg/dz,  B = df/d(x, phi) D,  A = df/dz - B dg/dz.
struct BlockDerivatives {
  Matrix A, B, C, D;
  double x = 0.0;
  Vector point;
  JacobianMethod method = JacobianMethod::Analytic;
  double det_gu = 0.0;
};

/// `split` is the number of leading coordinates forming (x, phi).
/// Throws SingularBlockError when g_u is not invertible at `s`.
BlockDerivatives block_derivatives(const SystemModel& map, const State& s, int split = 2);

/// Same algebra applied to a given Jacobian.
BlockDerivatives blocks_from_jacobian(const Matrix& J, int split);

/// Conditions ct0..ct5 over the sampled section minus the band |x| < delta.
/// ct1 and ct4 are evaluated along |x| = 2^-k; ct4 checks boundedness only.
/// For the wild model beta must lie in (rho, eta).
ConditionReport check_pseudohyperbolic(const SystemModel& map, const Grid& grid = {},
                                       double beta = 0.45);

}  // namespace chaoslab::verify
