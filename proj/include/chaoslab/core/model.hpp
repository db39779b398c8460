#pragma once

#include "chaoslab/core/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaoslab {

enum class ModelKind { Flow, Map };

/// A flow (vector field) or a discrete map, plus everything analyses need to
/// know about where it may be evaluated.
///
/// For maps `rule` is the raw step before angular reduction, so that it is a
/// continuous lift usable by finite differences and circle-map enumeration.
struct SystemModel {
  using Rule = std::function<Vector(const Vector&)>;
  using JacobianRule = std::function<Matrix(const Vector&)>;
  /// Value of the map as the locus is approached from side -1 or +1.
  using LimitRule = std::function<Vector(const Vector&, int side)>;

  std::string id;
  ModelKind kind = ModelKind::Map;
  int dimension = 0;
  std::map<std::string, double> params;
  Rule rule;
  JacobianRule jacobian;  // empty: central finite differences
  Domain domain;
  std::optional<Locus> locus;
  LimitRule one_sided_limit;
  std::vector<std::string> tags;
  std::optional<int> degree;  // topological degree of 1D circle maps
  double guard_band = 1e-9;

  bool is_flow() const { return kind == ModelKind::Flow; }
  bool is_map() const { return kind == ModelKind::Map; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian); }
  bool has_tag(const std::string& tag) const;
  double param(const std::string& name) const;

  /// Flow: the vector field. Map: one step with angles reduced.
  Vector evaluate(const Vector& s) const;
  /// True when `s` sits inside the discontinuity guard band.
  bool near_locus(const Vector& s) const;
};

enum class JacobianMethod { Analytic, FiniteDifference };

struct Jacobian {
  Matrix matrix;
  JacobianMethod method = JacobianMethod::Analytic;
  Vector fd_step;  // per-coordinate steps, empty when analytic
};

/// Analytic Jacobian when the model provides one, otherwise central
/// differences with h_i = 1e-6 * max(1, |s_i|).
///
/// Throws LocusProximityError if `s` is closer to the discontinuity locus than
/// the guard band (analytic) or 2h (finite differences).
Jacobian jacobian_at(const SystemModel& model, const State& s);

/// Central-difference Jacobian regardless of what the model offers.
Jacobian finite_difference_jacobian(const SystemModel& model, const State& s);

std::string to_string(JacobianMethod m);

}  // namespace chaoslab
