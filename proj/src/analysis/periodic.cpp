#include "chaoslab/analysis/periodic.hpp"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/core/orbit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>

namespace chaoslab {

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Attracting: return "attracting";
    case Stability::Saddle: return "saddle";
    case Stability::Repelling: return "repelling";
  }
  return "?";
}

namespace {

/// T^n(s), or nothing when an iterate reaches the locus guard band or leaves the domain.
std::optional<State> power(const SystemModel& map, State s, int n, std::vector<State>* visited = nullptr) {
  for (int i = 0; i < n; ++i) {
    if (map.near_locus(s)) return std::nullopt;
    if (visited) visited->push_back(s);
    s = map.evaluate(s);
    if (!s.allFinite() || !map.domain.contains(s)) return std::nullopt;
  }
  return s;
}

double residual(const SystemModel& map, const State& s, int n) {
  const auto t = power(map, s, n);
  return t ? map.domain.difference(*t, s).norm() : std::numeric_limits<double>::infinity();
}

int minimal_period(const SystemModel& map, const State& s, int n, double tol) {
  for (int p = 1; p < n; ++p)
    if (n % p == 0 && residual(map, s, p) < tol) return p;
  return n;
}

bool exhaustive_applicable(const SystemModel& map) {
  if (map.dimension != 1 || !map.degree || std::abs(*map.degree) < 2) return false;
  if (!map.domain.axes[0].angular()) return false;
  const double P = map.domain.axes[0].period;
  for (int i = 0; i < 4096; ++i) {
    State s = State::Constant(1, P * (i + 0.5) / 4096);
    if (std::abs(jacobian_at(map, s).matrix(0, 0)) <= 1.0) return false;
  }
  return true;
}

/// Roots of the n-th lift minus identity at every integer level.
std::vector<State> enumerate_circle(const SystemModel& map, int n) {
  const double P = map.domain.axes[0].period;
  const long d = *map.degree;
  const auto lift = [&](double x) {
    double y = x;
    for (int i = 0; i < n; ++i) {
      const double k = std::floor(y / P);
      y = map.rule(State::Constant(1, y - k * P))[0] + static_cast<double>(d) * k * P;
    }
    return y;
  };
  long dn = 1;
  for (int i = 0; i < n; ++i) dn *= d;
  const long D = dn - 1;
  const double g0 = lift(0.0) / P;
  const double inc = D > 0 ? 1.0 : -1.0;  // sign of G' on the lift
  std::vector<State> out;
  const long first = D > 0 ? static_cast<long>(std::ceil(g0)) : static_cast<long>(std::floor(g0));
  for (long j = 0; j < std::labs(D); ++j) {
    const double level = static_cast<double>(first) + inc * static_cast<double>(j);
    const auto G = [&](double x) { return inc * ((lift(x) - x) / P - level); };
    double a = 0.0, b = P;
    if (G(a) >= 0.0) {
      out.push_back(State::Constant(1, 0.0));
      continue;
    }
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      (G(m) < 0.0 ? a : b) = m;
    }
    State s = State::Constant(1, a);
    map.domain.reduce(s);
    out.push_back(s);
  }
  return out;
}

std::optional<State> newton(const SystemModel& map, State s, int n, const PeriodicSearchSettings& st) {
  const int dim = map.dimension;
  const auto F = [&](const State& x) -> std::optional<Vector> {
    const auto t = power(map, x, n);
    if (!t) return std::nullopt;
    return map.domain.difference(*t, x);
  };
  auto f = F(s);
  if (!f) return std::nullopt;
  for (int it = 0; it < st.max_newton; ++it) {
    const double norm = f->norm();
    if (norm < st.tolerance) return s;
    Matrix J = Matrix::Identity(dim, dim);
    try {
      State x = s;
      for (int i = 0; i < n; ++i) {
        J = jacobian_at(map, x).matrix * J;
        x = map.evaluate(x);
      }
    } catch (const LocusProximityError&) {
      return std::nullopt;
    }
    J -= Matrix::Identity(dim, dim);
    const Vector delta = -J.completeOrthogonalDecomposition().solve(*f);
    if (!delta.allFinite()) return std::nullopt;
    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k < 30 && !accepted; ++k, lambda *= 0.5) {
      State trial = s + lambda * delta;
      map.domain.reduce(trial);
      if (!map.domain.contains(trial)) continue;
      const auto ft = F(trial);
      if (ft && ft->norm() < norm) {
        s = trial;
        f = ft;
        accepted = true;
      }
    }
    if (!accepted) return std::nullopt;
  }
  return f->norm() < st.tolerance ? std::optional<State>(s) : std::nullopt;
}

std::vector<State> seeded_search(const SystemModel& map, int n, const PeriodicSearchSettings& st) {
  std::vector<std::pair<double, double>> box;
  for (int i = 0; i < map.dimension; ++i) {
    const Axis& ax = map.domain.axes[i];
    if (ax.angular()) {
      box.emplace_back(0.0, ax.period);
    } else if (std::isfinite(ax.lo) && std::isfinite(ax.hi)) {
      box.emplace_back(ax.lo, ax.hi);
    } else if (static_cast<int>(st.box.size()) == map.dimension) {
      box.push_back(st.box[i]);
    } else {
      throw PreconditionError("periodic search on an unbounded axis needs a seed box");
    }
  }
  std::vector<std::optional<State>> found(static_cast<std::size_t>(st.seeds));
  parallel_for(found.size(), st.threads, [&](std::size_t k) {
    auto rng = make_rng(st.seed, k);
    State s(map.dimension);
    for (int i = 0; i < map.dimension; ++i) s[i] = uniform(rng, box[i].first, box[i].second);
    found[k] = newton(map, s, n, st);
  });
  std::vector<State> out;
  for (auto& f : found)
    if (f) out.push_back(*f);
  return out;
}

}  // namespace

void classify(const SystemModel& map, PeriodicOrbitRecord& r, double tol) {
  const int dim = map.dimension;
  r.multipliers.clear();
  r.multipliers_flagged = false;
  r.neutral = false;
  Matrix J = Matrix::Identity(dim, dim);
  try {
    State x = r.point;
    for (int i = 0; i < r.period; ++i) {
      J = jacobian_at(map, x).matrix * J;
      x = map.evaluate(x);
    }
  } catch (const LocusProximityError&) {
    r.multipliers_flagged = true;
    r.stability = Stability::Saddle;
    return;
  }
  const Eigen::JacobiSVD<Matrix> svd(J);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv[sv.size() - 1] <= 1e-13 * sv[0]) r.multipliers_flagged = true;
  Eigen::EigenSolver<Matrix> es(J, false);
  bool all_in = true, all_out = true;
  for (int i = 0; i < dim; ++i) {
    const std::complex<double> mu = es.eigenvalues()[i];
    r.multipliers.push_back(mu);
    const double a = std::abs(mu);
    if (!(a < 1.0 - tol)) all_in = false;
    if (!(a > 1.0 + tol)) all_out = false;
    if (std::abs(a - 1.0) <= tol) r.neutral = true;
  }
  std::sort(r.multipliers.begin(), r.multipliers.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  r.stability = all_in ? Stability::Attracting : all_out ? Stability::Repelling : Stability::Saddle;
}

std::vector<PeriodicOrbitRecord> find_periodic_points(const SystemModel& map, int n,
                                                      const PeriodicSearchSettings& st) {
  if (!map.is_map()) throw PreconditionError("periodic point search needs a map");
  if (n < 1) throw PreconditionError("period must be at least 1");
  if (st.seeds < 1) throw PreconditionError("need at least one seed");
  const std::vector<State> roots = exhaustive_applicable(map) ? enumerate_circle(map, n) : seeded_search(map, n, st);

  std::vector<State> unique;
  for (State s : roots) {
    // Angles just below the period are the same point as 0.
    for (int i = 0; i < map.dimension; ++i) {
      const Axis& ax = map.domain.axes[i];
      if (ax.angular() && ax.period - s[i] < st.dedupe) s[i] = 0.0;
    }
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const State& u) {
      return map.domain.difference(s, u).norm() < st.dedupe;
    });
    if (!dup) unique.push_back(s);
  }
  std::sort(unique.begin(), unique.end(), [](const State& a, const State& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::vector<PeriodicOrbitRecord> out;
  for (const auto& s : unique) {
    PeriodicOrbitRecord r;
    r.period = n;
    r.point = s;
    r.residual = residual(map, s, n);
    r.minimal_period = minimal_period(map, s, n, st.dedupe);
    classify(map, r, st.classify_tolerance);
    out.push_back(std::move(r));
  }
  return out;
}

bool reverify_attracting(const SystemModel& map, const PeriodicOrbitRecord& r, double offset, long steps) {
  std::vector<State> cycle;
  if (!power(map, r.point, r.period, &cycle)) return false;
  State s = r.point;
  s[0] += offset;
  map.domain.reduce(s);
  for (long k = 0; k < steps; ++k) {
    const auto next = power(map, s, 1);
    if (!next) return false;
    s = *next;
    for (const auto& c : cycle)
      if (map.domain.difference(s, c).norm() < 1e-6) return true;
  }
  return false;
}

nlohmann::json to_json(const PeriodicOrbitRecord& r) {
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& m : r.multipliers) mult.push_back({m.real(), m.imag()});
  return {{"period", r.period},
          {"minimal_period", r.minimal_period},
          {"point", std::vector<double>(r.point.data(), r.point.data() + r.point.size())},
          {"multipliers", mult},
          {"stability", to_string(r.stability)},
          {"neutral", r.neutral},
          {"multipliers_flagged", r.multipliers_flagged},
          {"residual", r.residual}};
}

}  // namespace chaoslab
