#include "chaoslab/verify/conditions.hpp"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

namespace chaoslab::verify {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnitCircleTolerance = 1e-9;

double clean(double v) { return std::isnan(v) ? kInf : v; }

struct AxisRange {
  double lo = 0.0, hi = 1.0;
  bool periodic = false;
};

std::vector<double> axis_values(const AxisRange& a, int n, const std::optional<double>& locus, double delta) {
  std::vector<double> out;
  const int count = a.periodic ? n : n + 1;
  for (int i = 0; i < count; ++i) {
    const double v = a.lo + (a.hi - a.lo) * static_cast<double>(i) / n;
    if (locus && std::abs(v - *locus) < delta) continue;
    out.push_back(v);
  }
  if (locus) {
    for (double r = delta; r <= a.hi - a.lo; r *= 2.0) {
      if (*locus + r <= a.hi) out.push_back(*locus + r);
      if (*locus - r >= a.lo) out.push_back(*locus - r);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Vector> cartesian(const std::vector<std::vector<double>>& values) {
  std::vector<Vector> pts;
  std::size_t total = 1;
  for (const auto& v : values) total *= v.size();
  pts.reserve(total);
  std::vector<std::size_t> idx(values.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    Vector p(static_cast<long>(values.size()));
    for (std::size_t d = 0; d < values.size(); ++d) p[static_cast<long>(d)] = values[d][idx[d]];
    pts.push_back(std::move(p));
    for (std::size_t d = values.size(); d-- > 0;) {
      if (++idx[d] < values[d].size()) break;
      idx[d] = 0;
    }
  }
  return pts;
}

template <std::size_t K, typename F>
std::vector<std::array<double, K>> evaluate_all(const std::vector<Vector>& pts, int threads, F&& f) {
  std::vector<std::array<double, K>> out(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    out[i] = f(pts[i]);
    for (auto& v : out[i]) v = clean(v);
  });
  return out;
}

struct Extreme {
  double value = -kInf;
  std::size_t index = 0;
};

/// Max of quantity q; ties go to the lowest index so the result does not
/// depend on how the evaluation was split across threads.
template <std::size_t K>
Extreme max_of(const std::vector<std::array<double, K>>& vals, std::size_t q) {
  Extreme e;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i][q] > e.value) e = {vals[i][q], i};
  return e;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) return kInf;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

ConditionResult make_result(std::string id, bool holds, double value, Vector point, std::string note = {}) {
  return {std::move(id), holds, value, std::move(point), std::move(note)};
}

void stamp_grid(ConditionReport& r, const Grid& g) {
  r.grid_n = g.n;
  r.grid_delta = g.delta;
}

void require_grid(const Grid& g) {
  if (g.n < 2) throw PreconditionError("grid resolution n must be at least 2");
  if (!(g.delta > 0.0)) throw PreconditionError("excluded band delta must be positive");
  if (!(g.margin >= 0.0)) throw PreconditionError("margin must be non-negative");
}

/// Least-squares slope of ln(values) against ln(xs); non-positive values are skipped.
double log_log_slope(const std::vector<double>& xs, const std::vector<double>& values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    const double lx = std::log(xs[i]), ly = std::log(values[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

bool ConditionReport::all_hold() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.holds; });
}

bool ConditionReport::has(const std::string& id) const {
  return std::any_of(conditions.begin(), conditions.end(), [&](const auto& c) { return c.id == id; });
}

const ConditionResult& ConditionReport::at(const std::string& id) const {
  for (const auto& c : conditions)
    if (c.id == id) return c;
  throw PreconditionError("report has no condition '" + id + "'");
}

nlohmann::json to_json(const ConditionReport& report) {
  nlohmann::json derived = nlohmann::json::object();
  for (const auto& [k, v] : report.derived) derived[k] = v;
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : report.conditions) {
    nlohmann::json point = nlohmann::json::array();
    for (long i = 0; i < c.witness_point.size(); ++i) point.push_back(c.witness_point[i]);
    nlohmann::json entry = {{"condition", c.id},
                            {"holds", c.holds},
                            {"witness_value", std::isfinite(c.witness_value) ? nlohmann::json(c.witness_value)
                                                                             : nlohmann::json("inf")},
                            {"witness_point", point},
                            {"grid", {{"n", report.grid_n}, {"delta", report.grid_delta}}},
                            {"derived", derived}};
    if (!report.subject.empty()) entry["subject"] = report.subject;
    if (!c.note.empty()) entry["note"] = c.note;
    if (!report.flags.empty()) entry["flags"] = report.flags;
    out.push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------------------

ConditionReport check_anosov_matrix(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw PreconditionError("Anosov check needs a square matrix");
  ConditionReport r;
  r.subject = "matrix";

  const Matrix rounded = A.array().round().matrix();
  Eigen::Index wi = 0, wj = 0;
  const double off = (A - rounded).cwiseAbs().maxCoeff(&wi, &wj);
  Vector where(2);
  where << static_cast<double>(wi), static_cast<double>(wj);
  r.conditions.push_back(make_result("integer", off == 0.0, off, where));

  const double det = A.determinant();
  r.derived["det"] = det;
  r.conditions.push_back(
      make_result("unimodular", std::abs(std::abs(det) - 1.0) < 1e-9, det, Vector::Constant(1, det)));

  Eigen::EigenSolver<Matrix> es(A, false);
  const auto& ev = es.eigenvalues();
  double worst = kInf;
  Vector witness(2);
  witness.setZero();
  double radius = 0.0;
  for (long i = 0; i < ev.size(); ++i) {
    const double mod = std::abs(ev[i]);
    radius = std::max(radius, mod);
    r.derived["abs_eigenvalue_" + std::to_string(i)] = mod;
    if (std::abs(mod - 1.0) < worst) {
      worst = std::abs(mod - 1.0);
      witness << ev[i].real(), ev[i].imag();
    }
  }
  r.derived["spectral_radius"] = radius;
  r.conditions.push_back(make_result("hyperbolic", worst > kUnitCircleTolerance, std::hypot(witness[0], witness[1]),
                                     witness, "witness is the eigenvalue closest to the unit circle (re, im)"));
  return r;
}

ConditionReport check_anosov_matrix(const IntMatrix& A) { return check_anosov_matrix(Matrix(A.cast<double>())); }

ConditionReport check_expansion(const SystemModel& map, const Grid& grid) {
  require_grid(grid);
  if (!map.is_map()) throw PreconditionError("expansion check needs a map");
  for (const auto& a : map.domain.axes)
    if (!a.angular()) throw PreconditionError("expansion check needs a torus or circle endomorphism");

  std::vector<std::vector<double>> values;
  for (const auto& a : map.domain.axes) values.push_back(axis_values({a.lo, a.hi, true}, grid.n, std::nullopt, 0));
  const auto pts = cartesian(values);
  std::atomic<bool> fd{false};
  const auto vals = evaluate_all<1>(pts, grid.threads, [&](const Vector& p) {
    const Jacobian j = jacobian_at(map, p);
    if (j.method == JacobianMethod::FiniteDifference) fd = true;
    const auto sv = Eigen::JacobiSVD<Matrix>(j.matrix).singularValues();
    const double smin = sv[sv.size() - 1];
    return std::array<double, 1>{smin > 0.0 ? 1.0 / smin : kInf};
  });
  const Extreme e = max_of(vals, 0);

  ConditionReport r;
  r.subject = map.id;
  stamp_grid(r, grid);
  r.derived["sup_inverse_norm"] = e.value;
  if (fd) r.flags.push_back("finite-difference jacobian");
  std::string note = std::isinf(e.value) ? "singular derivative at witness" : "";
  r.conditions.push_back(make_result("expansion", e.value < 1.0 - grid.margin, e.value, pts[e.index], note));
  return r;
}

// ---------------------------------------------------------------------------

ConditionReport check_lorenz_conditions(const SystemModel& map, const Grid& grid) {
  require_grid(grid);
  if (!map.is_map() || map.dimension != 2) throw PreconditionError("Lorenz conditions need a planar map");
  if (!map.locus || map.locus->coordinate != 1)
    throw PreconditionError("Lorenz conditions need a discontinuity locus in y");

  const std::vector<std::vector<double>> values = {
      axis_values({-1.0, 1.0, false}, grid.n, std::nullopt, 0),
      axis_values({-1.0, 1.0, false}, grid.n, map.locus->value, grid.delta)};
  const auto pts = cartesian(values);
  std::atomic<bool> fd{false};
  // Quantities: |f_x|, |g_y^-1|, |g_x|, |g_y^-1 f_y|, -slack(b), -slack(d).
  const auto vals = evaluate_all<6>(pts, grid.threads, [&](const Vector& p) {
    const Jacobian j = jacobian_at(map, p);
    if (j.method == JacobianMethod::FiniteDifference) fd = true;
    const double fx = std::abs(j.matrix(0, 0)), fy = j.matrix(0, 1);
    const double gx = std::abs(j.matrix(1, 0)), gy = j.matrix(1, 1);
    const double a = gy != 0.0 ? std::abs(1.0 / gy) : kInf;
    const double d = gy != 0.0 ? std::abs(fy / gy) : kInf;
    const double sb = 1.0 - a * fx - 2.0 * std::sqrt(a * gx * d);
    const double sd = (1.0 - fx) * (1.0 - a) - d * gx;
    return std::array<double, 6>{fx, a, gx, d, -sb, -sd};
  });

  const Extreme efx = max_of(vals, 0), ea = max_of(vals, 1), egx = max_of(vals, 2), ed = max_of(vals, 3);
  const Extreme eb_slack = max_of(vals, 4), ed_slack = max_of(vals, 5);
  const double a = ea.value, b = efx.value, c = egx.value, d = ed.value;

  ConditionReport r;
  r.subject = map.id;
  stamp_grid(r, grid);
  if (fd) r.flags.push_back("finite-difference jacobian");
  r.derived["sup_fx"] = b;
  r.derived["sup_gy_inv"] = a;
  r.derived["sup_gx"] = c;
  r.derived["sup_gy_inv_fy"] = d;

  r.conditions.push_back(make_result("a", b < 1.0 - grid.margin, b, pts[efx.index]));
  const double lhs_b = (1.0 - a * b) - 2.0 * std::sqrt(a * c * d);
  r.conditions.push_back(make_result("b", clean(-lhs_b) < -grid.margin, lhs_b, pts[eb_slack.index],
                                     "value is 1 - |gy^-1||fx| - 2 sqrt(|gy^-1||gx||gy^-1 fy|); "
                                     "witness has the smallest pointwise slack"));
  r.conditions.push_back(make_result("c", a < 1.0 - grid.margin, a, pts[ea.index],
                                     std::isinf(a) ? "g_y vanishes at witness" : ""));
  const double lhs_d = (1.0 - b) * (1.0 - a) - d * c;
  r.conditions.push_back(make_result("d", clean(-lhs_d) < -grid.margin, lhs_d, pts[ed_slack.index],
                                     "value is (1-|fx|)(1-|gy^-1|) - |gy^-1 fy||gx|; "
                                     "witness has the smallest pointwise slack"));

  if (r.all_hold()) {
    const LorenzNorms n{a, b, c, d};
    r.derived["q"] = compute_q(n, QVariant::AsPrinted);
    r.derived["q_squared"] = compute_q(n, QVariant::Squared);
  }
  return r;
}

LorenzNorms lorenz_norms(const ConditionReport& report) {
  const auto get = [&](const char* key) {
    auto it = report.derived.find(key);
    if (it == report.derived.end())
      throw PreconditionError(std::string("report lacks the Lorenz sup-norm '") + key + "'");
    return it->second;
  };
  return {get("sup_gy_inv"), get("sup_fx"), get("sup_gx"), get("sup_gy_inv_fy")};
}

double compute_q(const LorenzNorms& n, QVariant variant) {
  const double a = n.gy_inv, b = n.fx, c = n.gx, d = n.gy_inv_fy;
  if (!(a < 1.0) || !(a > 0.0)) throw PreconditionError("q needs 0 < ||(g_y)^-1|| < 1");
  const double radicand = variant == QVariant::AsPrinted ? 1.0 - a * a * b - 4.0 * a * c * d
                                                         : (1.0 - a * b) * (1.0 - a * b) - 4.0 * a * c * d;
  if (radicand < 0.0) {
    std::ostringstream msg;
    msg << "negative radicand " << radicand << " in q: the cross-term inequality cannot hold";
    throw ConditionInconsistencyError(msg.str());
  }
  const double q = (1.0 + a * b + std::sqrt(radicand)) / (2.0 * a);
  if (!(q > 1.0)) {
    std::ostringstream msg;
    msg << "q = " << q << " is not above 1 although the conditions were reported to hold";
    throw ConditionInconsistencyError(msg.str());
  }
  return q;
}

double compute_q(const ConditionReport& report, QVariant variant) {
  for (const auto& c : report.conditions)
    if (!c.holds) throw PreconditionError("q is defined only when every Lorenz condition holds (failed: " + c.id + ")");
  return compute_q(lorenz_norms(report), variant);
}

// ---------------------------------------------------------------------------

ConditionReport check_saddle_focus_gap(const SaddleFocusExponents& e) {
  ConditionReport r;
  r.subject = "saddle-focus";
  Vector w(3);
  w << e.gamma, e.lambda, e.omega;
  bool ordering = e.gamma > 0.0 && e.lambda > 0.0;
  double worst_alpha = kInf;
  for (double a : e.alphas) {
    worst_alpha = std::min(worst_alpha, a);
    ordering = ordering && e.lambda < a;
  }
  r.conditions.push_back(make_result("ordering", ordering, worst_alpha - e.lambda, w,
                                     "value is min Re(alpha) - lambda"));
  r.conditions.push_back(make_result("rotation", e.omega != 0.0, e.omega, w));
  r.conditions.push_back(make_result("gap", e.gamma > 2.0 * e.lambda, e.gamma - 2.0 * e.lambda, w,
                                     "value is gamma - 2 lambda"));
  const double rho = e.gamma != 0.0 ? e.lambda / e.gamma : kInf;
  r.derived["rho"] = rho;
  r.conditions.push_back(make_result("rho", e.gamma > 0.0 && rho < 0.5, rho, w));
  return r;
}

// ---------------------------------------------------------------------------

BlockDerivatives blocks_from_jacobian(const Matrix& J, int split) {
  const long n = J.rows();
  if (J.cols() != n || split < 1 || split >= n)
    throw PreconditionError("block split must leave at least one coordinate on each side");
  const long k = split, m = n - split;
  const Matrix gu = J.topLeftCorner(k, k), gz = J.topRightCorner(k, m);
  const Matrix fu = J.bottomLeftCorner(m, k), fz = J.bottomRightCorner(m, m);
  BlockDerivatives out;
  out.det_gu = gu.determinant();
  const auto sv = Eigen::JacobiSVD<Matrix>(gu).singularValues();
  if (!gu.allFinite() || !(sv[k - 1] > 1e-13 * sv[0])) {
    std::ostringstream msg;
    msg << "dg/d(x,phi) is singular (det = " << out.det_gu << ")";
    throw SingularBlockError(msg.str());
  }
  out.D = gu.inverse();
  out.C = out.D * gz;
  out.B = fu * out.D;
  out.A = fz - out.B * gz;
  return out;
}

BlockDerivatives block_derivatives(const SystemModel& map, const State& s, int split) {
  if (!map.is_map()) throw PreconditionError("block derivatives need a map");
  const Jacobian j = jacobian_at(map, s);
  BlockDerivatives out;
  try {
    out = blocks_from_jacobian(j.matrix, split);
  } catch (const SingularBlockError& e) {
    std::ostringstream msg;
    msg << e.what() << " at (";
    for (long i = 0; i < s.size(); ++i) msg << (i ? ", " : "") << s[i];
    msg << ")";
    throw SingularBlockError(msg.str());
  }
  out.point = s;
  out.x = map.locus ? s[map.locus->coordinate] - map.locus->value : s[0];
  out.method = j.method;
  return out;
}

ConditionReport check_pseudohyperbolic(const SystemModel& map, const Grid& grid, double beta) {
  require_grid(grid);
  if (!map.is_map() || map.dimension < 3) throw PreconditionError("pseudo-hyperbolicity needs a map of dimension >= 3");
  if (!map.locus) throw PreconditionError("pseudo-hyperbolicity needs a discontinuity locus");
  if (!(beta > 0.0)) throw PreconditionError("beta must be positive");
  if (map.id == "wild" && !(beta > map.param("rho") && beta < map.param("eta")))
    throw PreconditionError("beta must lie in (rho, eta) for the wild map");
  if (grid.sequence_length < 2) throw PreconditionError("limit sequence needs at least two terms");
  const int lc = map.locus->coordinate;
  const double lv = map.locus->value;

  std::vector<AxisRange> ranges;
  for (const auto& a : map.domain.axes) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) throw PreconditionError("section must be bounded");
    ranges.push_back({a.lo, a.hi, a.angular()});
  }

  // Quantities: |A|, |B|, |C|, |D|, sqrt(|A||D|), sqrt|det D|, -sigma_min/sigma_max of g_u, singular flag.
  constexpr std::size_t K = 8;
  std::atomic<bool> fd{false};
  const auto evaluate = [&](const Vector& p) -> std::array<double, K> {
    try {
      const BlockDerivatives b = block_derivatives(map, p);
      if (b.method == JacobianMethod::FiniteDifference) fd = true;
      const double na = spectral_norm(b.A), nd = spectral_norm(b.D);
      const auto sv = Eigen::JacobiSVD<Matrix>(b.D).singularValues();
      return {na, spectral_norm(b.B), spectral_norm(b.C), nd, std::sqrt(na * nd),
              std::sqrt(std::abs(b.D.determinant())), -(sv[sv.size() - 1] / sv[0]), 0.0};
    } catch (const SingularBlockError&) {
      return {kInf, kInf, kInf, kInf, kInf, kInf, 0.0, 1.0};
    }
  };

  std::vector<std::vector<double>> values;
  for (int i = 0; i < map.dimension; ++i)
    values.push_back(axis_values(ranges[i], grid.n, i == lc ? std::optional<double>(lv) : std::nullopt, grid.delta));
  const auto pts = cartesian(values);
  const auto vals = evaluate_all<K>(pts, grid.threads, evaluate);

  const Extreme eA = max_of(vals, 0), eB = max_of(vals, 1), eC = max_of(vals, 2);
  const Extreme eAD = max_of(vals, 4), eDet = max_of(vals, 5), eSing = max_of(vals, 7);
  const Extreme eCond = max_of(vals, 6);
  const double cross = std::sqrt(eB.value * eC.value);

  ConditionReport r;
  r.subject = map.id;
  stamp_grid(r, grid);
  r.derived["sup_A"] = eA.value;
  r.derived["sup_B"] = eB.value;
  r.derived["sup_C"] = eC.value;
  r.derived["sup_D"] = max_of(vals, 3).value;
  r.derived["sup_sqrt_AD"] = eAD.value;
  r.derived["sup_sqrt_detD"] = eDet.value;
  r.derived["beta"] = beta;

  const bool singular = eSing.value > 0.0;
  const std::size_t ct0_index = singular ? eSing.index : eCond.index;
  r.conditions.push_back(make_result("ct0", !singular, singular ? 0.0 : -eCond.value, pts[ct0_index],
                                     "value is the smallest sampled sigma_min/sigma_max of dg/d(x,phi)"));

  // Limits toward the locus along |x| = 2^-k, sup over the remaining coordinates.
  std::vector<std::vector<double>> slice_values = values;
  const int K_seq = grid.sequence_length;
  std::vector<double> xs, seqC, seqAD, seqAbeta, seqDbeta, seqB;
  Vector last_ad_point, worst4_point;
  double worst4_value = -kInf;
  std::string worst4_name;
  for (int k = 1; k <= K_seq; ++k) {
    const double ax = std::ldexp(1.0, -k);
    slice_values[lc] = {};
    if (lv - ax >= ranges[lc].lo) slice_values[lc].push_back(lv - ax);
    if (lv + ax <= ranges[lc].hi) slice_values[lc].push_back(lv + ax);
    const auto spts = cartesian(slice_values);
    const auto svals = evaluate_all<K>(spts, grid.threads, evaluate);
    double supC = -kInf, supAD = -kInf, supAb = -kInf, supDb = -kInf, supB = -kInf;
    std::size_t ad_index = 0;
    for (std::size_t i = 0; i < svals.size(); ++i) {
      const auto& v = svals[i];
      const double ad = v[0] * v[3];
      if (ad > supAD) supAD = ad, ad_index = i;
      supC = std::max(supC, v[2]);
      supB = std::max(supB, v[1]);
      supAb = std::max(supAb, v[0] * std::pow(ax, -beta));
      supDb = std::max(supDb, v[3] * std::pow(ax, beta));
      const double m4 = std::max({v[0] * std::pow(ax, -beta), v[3] * std::pow(ax, beta), v[1], v[2]});
      if (m4 > worst4_value) worst4_value = m4, worst4_point = spts[i];
    }
    xs.push_back(ax);
    seqC.push_back(supC);
    seqAD.push_back(supAD);
    seqAbeta.push_back(supAb);
    seqDbeta.push_back(supDb);
    seqB.push_back(supB);
    last_ad_point = spts[ad_index];
  }
  r.series["abs_x"] = xs;
  r.series["sup_C"] = seqC;
  r.series["sup_AD"] = seqAD;
  r.series["sup_A_x^-beta"] = seqAbeta;
  r.series["sup_D_x^beta"] = seqDbeta;
  r.series["sup_B"] = seqB;

  const auto non_increasing = [](const std::vector<double>& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] > s[i - 1] * (1.0 + 1e-12) + 1e-300) return false;
    return true;
  };
  const double finalAD = seqAD.back(), finalC = seqC.back();
  const bool ct1 = non_increasing(seqAD) && non_increasing(seqC) && finalAD < grid.limit_tolerance &&
                   finalC < grid.limit_tolerance;
  r.derived["ct1_final_AD"] = finalAD;
  r.derived["ct1_final_C"] = finalC;
  r.derived["ct1_AD_decay_exponent"] = log_log_slope(xs, seqAD);
  r.conditions.push_back(make_result("ct1", ct1, std::max(finalAD, finalC), last_ad_point,
                                     "numerical evidence, not proof: sup |A||D| and sup |C| along |x| = 2^-k "
                                     "must decrease and end below the limit tolerance"));

  r.conditions.push_back(make_result("ct2", eAD.value + cross < 1.0 - grid.margin, eAD.value + cross, pts[eAD.index]));
  r.conditions.push_back(make_result("ct3", eA.value + cross < 1.0 - grid.margin, eA.value + cross, pts[eA.index]));

  // Bounded means finite and not growing like a negative power of |x|.
  constexpr double kGrowthSlack = -0.05;
  bool bounded = std::isfinite(worst4_value);
  for (const auto* s : {&seqAbeta, &seqDbeta, &seqB, &seqC}) {
    const double slope = log_log_slope(xs, *s);
    bounded = bounded && slope >= kGrowthSlack;
  }
  r.derived["ct4_AX_slope"] = log_log_slope(xs, seqAbeta);
  r.derived["ct4_DX_slope"] = log_log_slope(xs, seqDbeta);
  r.conditions.push_back(make_result("ct4", bounded, worst4_value, worst4_point,
                                     "boundedness of A|x|^-beta, D|x|^beta, B, C only; Hoelder modulus not checked"));

  r.conditions.push_back(
      make_result("ct5", eDet.value + cross < 1.0 - grid.margin, eDet.value + cross, pts[eDet.index]));
  if (fd) r.flags.push_back("finite-difference jacobian");
  return r;
}

}  // namespace chaoslab::verify
