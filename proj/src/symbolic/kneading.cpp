#include "chaoslab/symbolic/kneading.hpp"

#include "chaoslab/core/graph.hpp"
#include "chaoslab/core/integrate.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/verify/conditions.hpp"

#include <ostream>
#include <sstream>

namespace chaoslab::symbolic {
namespace {

int rank(char c) {
  switch (c) {
    case 'L': return 0;
    case kZeroMarker: return 1;
    case 'R': return 2;
    default: return 3;
  }
}

int first_difference(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return static_cast<int>(i);
  return a.size() == b.size() ? -1 : static_cast<int>(n);
}

using Branch = std::function<double(const double&)>;

std::pair<double, double> branch_image(const Branch& f, double a, double b, int samples) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i <= samples; ++i) {
    const double v = f(a + (b - a) * i / samples);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

/// Roots of f(y) = c on [a, b] by sign changes on a sample grid plus bisection.
void preimages(const Branch& f, double a, double b, double c, std::vector<double>& out) {
  constexpr int kSamples = 2048;
  double prev_y = a, prev_v = f(a) - c;
  if (prev_v == 0.0) out.push_back(a);
  for (int i = 1; i <= kSamples; ++i) {
    const double y = a + (b - a) * i / kSamples;
    const double v = f(y) - c;
    if (v == 0.0) {
      out.push_back(y);
    } else if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      double lo = prev_y, hi = y, flo = prev_v;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid) - c;
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev_y = y;
    prev_v = v;
  }
}

std::vector<int> strongly_connected(const Eigen::MatrixXi& M, int& count) {
  Adjacency adj(static_cast<std::size_t>(M.rows()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (M(i, j) != 0) adj[i].push_back(j);
  return strongly_connected_components(adj, count);
}

}  // namespace

std::string to_text(const KneadingInvariant& k) { return "+ : " + k.plus + "\n- : " + k.minus + "\n"; }

nlohmann::json to_json(const KneadingInvariant& k) {
  return {{"plus", k.plus}, {"minus", k.minus}, {"length", k.length}, {"source", k.source},
          {"arithmetic", k.arithmetic}};
}

int compare_itineraries(const std::string& a, const std::string& b, bool left_reverses, bool right_reverses) {
  const int i = first_difference(a, b);
  if (i < 0) return 0;
  bool flipped = false;
  for (int j = 0; j < i; ++j)
    if ((a[j] == 'L' && left_reverses) || (a[j] == 'R' && right_reverses)) flipped = !flipped;
  int cmp;
  if (static_cast<std::size_t>(i) >= a.size()) cmp = -1;
  else if (static_cast<std::size_t>(i) >= b.size()) cmp = 1;
  else cmp = rank(a[i]) < rank(b[i]) ? -1 : 1;
  return flipped ? -cmp : cmp;
}

KneadingComparison compare_kneading(const KneadingInvariant& a, const KneadingInvariant& b, bool left_reverses,
                                    bool right_reverses) {
  if (a.length != b.length) throw PreconditionError("kneading invariants must have equal lengths");
  KneadingComparison c;
  c.plus_index = first_difference(a.plus, b.plus);
  c.minus_index = first_difference(a.minus, b.minus);
  c.equal = c.plus_index < 0 && c.minus_index < 0;
  c.order = compare_itineraries(a.plus, b.plus, left_reverses, right_reverses);
  if (c.order == 0) c.order = compare_itineraries(a.minus, b.minus, left_reverses, right_reverses);
  return c;
}

std::string to_text(const KneadingComparison& c) {
  if (c.equal) return "equal";
  std::ostringstream os;
  const int first = c.plus_index < 0 ? c.minus_index
                    : c.minus_index < 0 ? c.plus_index
                                        : std::min(c.plus_index, c.minus_index);
  os << "differ at index " << first << " (plus: " << c.plus_index << ", minus: " << c.minus_index << ")";
  return os.str();
}

bool verify_two_full_branches(const IntervalMap1D<double>& G, int samples) {
  if (G.continuous_at_zero())
    throw PreconditionError("full-branch check needs a discontinuity at 0 (G(0+) == G(0-))");
  const double lo = std::min(G.limit_plus, G.limit_minus), hi = std::max(G.limit_plus, G.limit_minus);
  constexpr double tol = 1e-12;
  const auto [rl, rh] = branch_image(G.right, 0.0, 1.0, samples);
  const auto [ll, lh] = branch_image(G.left, -1.0, 0.0, samples);
  return rl <= lo + tol && rh >= hi - tol && ll <= lo + tol && lh >= hi - tol;
}

double spectral_radius(const Eigen::MatrixXi& M, long* iterations, bool* converged) {
  if (M.rows() != M.cols()) throw PreconditionError("spectral radius needs a square matrix");
  if ((M.array() < 0).any()) throw PreconditionError("spectral radius needs a nonnegative matrix");
  int count = 0;
  const auto comp = strongly_connected(M, count);
  double best = 0.0;
  long total_iterations = 0;
  bool all_converged = true;
  for (int c = 0; c < count; ++c) {
    std::vector<int> members;
    for (int i = 0; i < static_cast<int>(comp.size()); ++i)
      if (comp[i] == c) members.push_back(i);
    const int m = static_cast<int>(members.size());
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) B(i, j) = M(members[i], members[j]);
    if (m == 1 && B(0, 0) == 0.0) continue;
    B += Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    double estimate = 0.0;
    bool ok = false;
    for (long it = 0; it < 100000; ++it) {
      ++total_iterations;
      const Eigen::VectorXd w = B * v;
      const Eigen::ArrayXd ratio = w.array() / v.array();
      const double rlo = ratio.minCoeff(), rhi = ratio.maxCoeff();
      estimate = 0.5 * (rlo + rhi);
      v = w / w.maxCoeff();
      if (rhi - rlo <= 1e-12 * rhi) {
        ok = true;
        break;
      }
    }
    all_converged = all_converged && ok;
    best = std::max(best, estimate - 1.0);
  }
  if (iterations) *iterations = total_iterations;
  if (converged) *converged = all_converged;
  return best;
}

TransitionMatrix build_transition_matrix(const IntervalMap1D<double>& G, int depth) {
  if (depth < 1) throw PreconditionError("partition depth k must be at least 1");
  constexpr double kMinWidth = 1e-12;
  std::vector<double> cuts{0.0}, frontier{0.0};
  for (int d = 2; d <= depth; ++d) {
    std::vector<double> next;
    for (double c : frontier) {
      preimages(G.left, -1.0, -0.0, c, next);
      preimages(G.right, 0.0, 1.0, c, next);
    }
    frontier.clear();
    for (double y : next) {
      if (!(y > -1.0 && y < 1.0) || y == 0.0) continue;
      frontier.push_back(y);
      cuts.push_back(y);
    }
  }
  std::vector<double> raw = cuts;
  raw.push_back(-1.0);
  raw.push_back(1.0);
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

  TransitionMatrix t;
  t.depth = depth;
  // Merge slivers: drop a boundary too close to the previously kept one,
  // except 0 and the endpoints, which always survive.
  for (double b : raw) {
    if (!t.boundaries.empty() && b - t.boundaries.back() < kMinWidth) {
      ++t.merged_cells;
      const bool keep_new = b == 0.0 || b == 1.0;
      if (keep_new && t.boundaries.size() > 1) t.boundaries.back() = b;
      continue;
    }
    t.boundaries.push_back(b);
  }
  const int n = static_cast<int>(t.boundaries.size()) - 1;
  t.matrix = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double a = t.boundaries[i], b = t.boundaries[i + 1];
    const Branch& f = b <= 0.0 ? G.left : G.right;
    const auto [lo, hi] = branch_image(f, a, b, 64);
    for (int j = 0; j < n; ++j) {
      const double overlap = std::min(hi, t.boundaries[j + 1]) - std::max(lo, t.boundaries[j]);
      if (overlap > kMinWidth) t.matrix(i, j) = 1;
    }
  }
  t.spectral_radius = spectral_radius(t.matrix, &t.iterations, &t.converged);
  t.entropy = t.spectral_radius > 1.0 ? std::log(t.spectral_radius) : 0.0;
  return t;
}

void write_transition_csv(std::ostream& os, const TransitionMatrix& t) {
  for (long i = 0; i < t.matrix.rows(); ++i) {
    for (long j = 0; j < t.matrix.cols(); ++j) os << (j ? "," : "") << t.matrix(i, j);
    os << "\n";
  }
}

nlohmann::json to_json(const TransitionMatrix& t) {
  return {{"entropy", t.entropy},
          {"depth", t.depth},
          {"spectral_radius", t.spectral_radius},
          {"cells", t.matrix.rows()},
          {"merged_cells", t.merged_cells},
          {"converged", t.converged},
          {"boundaries", t.boundaries}};
}

IntervalMap1D<double> reduce_to_1d(const SystemModel& map, const ReductionSettings& s) {
  if (!map.is_map() || map.dimension != 2 || !map.locus || map.locus->coordinate != 1)
    throw PreconditionError("reduction needs a planar map with discontinuity at y = 0");
  if (s.n_fit < 1 || s.seeds < 1 || s.bins < 2 || s.max_reference < 1)
    throw PreconditionError("reduction settings must be positive");

  verify::Grid grid;
  grid.n = 64;
  const auto conditions = verify::check_lorenz_conditions(map, grid);
  const double fx = conditions.derived.at("sup_fx");
  if (!(fx < 1.0)) {
    std::ostringstream msg;
    msg << "map is not contracting in x on the sampled region (sup |f_x| = " << fx << ")";
    throw ReductionInvalidError(msg.str());
  }

  std::vector<double> xs;
  for (int k = 0; k < s.seeds; ++k) {
    auto rng = make_rng(s.seed, static_cast<std::uint64_t>(k));
    Vector s0(2);
    s0 << uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0);
    if (map.near_locus(s0)) continue;
    const Orbit orbit = iterate_map(map, s0, s.n_transient + s.n_fit);
    for (std::size_t i = static_cast<std::size_t>(s.n_transient) + 1; i < orbit.size(); ++i)
      xs.push_back(orbit.states[i][0]);
  }
  if (xs.empty()) throw ReductionInvalidError("no orbit survived the transient; attractor section is empty");
  std::sort(xs.begin(), xs.end());
  std::vector<double> ref;
  const std::size_t take = std::min<std::size_t>(xs.size(), static_cast<std::size_t>(s.max_reference));
  for (std::size_t i = 0; i < take; ++i) ref.push_back(xs[take == 1 ? 0 : i * (xs.size() - 1) / (take - 1)]);
  ref.erase(std::unique(ref.begin(), ref.end()), ref.end());

  const auto g_at = [rule = map.rule, limit = map.one_sided_limit](double x, double y, int side) {
    Vector p(2);
    p << x, y;
    if (y == 0.0 && limit) return limit(p, side)[1];
    return rule(p)[1];
  };

  // Spread of g over the reference x-set at bin centres.
  double worst = 0.0;
  for (int side : {-1, 1}) {
    for (int b = 0; b < s.bins; ++b) {
      const double y = side * (b + 0.5) / s.bins;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (double x : ref) {
        const double v = g_at(x, y, side);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, hi - lo);
    }
  }
  const double residual = worst / 2.0;
  if (residual > s.residual_threshold) {
    std::ostringstream msg;
    msg << "reduction residual " << residual << " exceeds " << s.residual_threshold
        << " (g depends on x across the attractor section)";
    throw ReductionInvalidError(msg.str());
  }
  // When g ignores x on the section one reference value is exact.
  if (worst == 0.0) ref.resize(1);

  IntervalMap1D<double> G;
  const auto average = [ref, g_at](double y, int side) {
    double sum = 0.0;
    for (double x : ref) sum += g_at(x, y, side);
    return sum / static_cast<double>(ref.size());
  };
  G.left = [average](const double& y) { return average(y, -1); };
  G.right = [average](const double& y) { return average(y, 1); };
  G.source = map.id + " (reduced)";
  annotate(G, 1024);
  G.fit_residual = residual;
  return G;
}

}  // namespace chaoslab::symbolic
