#include "chaoslab/core/model.hpp"

#include "chaoslab/core/errors.hpp"

#include <algorithm>
#include <sstream>

namespace chaoslab {

Domain Domain::box(const std::vector<std::pair<double, double>>& bounds) {
  Domain d;
  for (const auto& [lo, hi] : bounds) d.axes.push_back({lo, hi, 0.0});
  return d;
}

Domain Domain::torus(int dim, double period) {
  Domain d;
  d.axes.assign(dim, Axis{0.0, period, period});
  return d;
}

Domain Domain::unbounded(int dim) {
  Domain d;
  d.axes.assign(dim, Axis{});
  return d;
}

bool Domain::contains(const Vector& s) const {
  if (s.size() != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    if (!std::isfinite(s[i])) return false;
    if (axes[i].angular()) continue;
    if (s[i] < axes[i].lo || s[i] > axes[i].hi) return false;
  }
  return true;
}

bool Domain::has_angles() const {
  return std::any_of(axes.begin(), axes.end(), [](const Axis& a) { return a.angular(); });
}

void Domain::reduce(Vector& s) const {
  for (int i = 0; i < dimension(); ++i)
    if (axes[i].angular()) s[i] = wrap(s[i], axes[i].period);
}

Vector Domain::periods() const {
  Vector p(dimension());
  for (int i = 0; i < dimension(); ++i) p[i] = axes[i].period;
  return p;
}

Vector Domain::difference(const Vector& a, const Vector& b) const {
  Vector d = a - b;
  for (int i = 0; i < dimension(); ++i)
    if (axes[i].angular()) d[i] = circular_difference(a[i], b[i], axes[i].period);
  return d;
}

bool SystemModel::has_tag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

double SystemModel::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end())
    throw PreconditionError("model '" + id + "' has no parameter '" + name + "'");
  return it->second;
}

Vector SystemModel::evaluate(const Vector& s) const {
  Vector out = rule(s);
  if (is_map()) domain.reduce(out);
  return out;
}

bool SystemModel::near_locus(const Vector& s) const {
  return locus && locus->distance(s) < guard_band;
}

Jacobian finite_difference_jacobian(const SystemModel& model, const State& s) {
  const int n = model.dimension;
  Jacobian jac;
  jac.method = JacobianMethod::FiniteDifference;
  jac.fd_step.resize(n);
  for (int i = 0; i < n; ++i) jac.fd_step[i] = 1e-6 * std::max(1.0, std::abs(s[i]));
  if (model.locus) {
    const int c = model.locus->coordinate;
    if (model.locus->distance(s) < 2.0 * jac.fd_step[c]) {
      std::ostringstream msg;
      msg << "finite-difference Jacobian requested within 2h of the locus (distance "
          << model.locus->distance(s) << ")";
      throw LocusProximityError(msg.str());
    }
  }
  jac.matrix.resize(n, n);
  Vector plus = s, minus = s;
  for (int i = 0; i < n; ++i) {
    const double h = jac.fd_step[i];
    plus[i] = s[i] + h;
    minus[i] = s[i] - h;
    jac.matrix.col(i) = (model.rule(plus) - model.rule(minus)) / (2.0 * h);
    plus[i] = minus[i] = s[i];
  }
  return jac;
}

Jacobian jacobian_at(const SystemModel& model, const State& s) {
  if (s.size() != model.dimension)
    throw PreconditionError("state dimension does not match model '" + model.id + "'");
  if (!model.has_analytic_jacobian()) return finite_difference_jacobian(model, s);
  if (model.near_locus(s))
    throw LocusProximityError("Jacobian requested inside the discontinuity guard band of '" +
                              model.id + "'");
  return Jacobian{model.jacobian(s), JacobianMethod::Analytic, {}};
}

std::string to_string(JacobianMethod m) {
  return m == JacobianMethod::Analytic ? "analytic" : "finite-difference";
}

}  // namespace chaoslab
