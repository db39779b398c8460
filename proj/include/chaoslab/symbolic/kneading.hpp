#pragma once

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/model.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace chaoslab::symbolic {

/// 50 significant digits; enough to follow expanding orbits for 64+ steps.
using HighPrecision = boost::multiprecision::cpp_bin_float_50;

/// Interval map G on [-1, 1] with a single discontinuity at 0.
/// `left` is used for y < 0 and `right` for y >= 0; both must extend
/// continuously to 0, which defines the one-sided limits.
template <typename Scalar = double>
struct IntervalMap1D {
  std::function<Scalar(const Scalar&)> left;
  std::function<Scalar(const Scalar&)> right;
  Scalar limit_minus = 0;  // G(0-)
  Scalar limit_plus = 0;   // G(0+)
  bool left_monotone = true, right_monotone = true;
  bool left_increasing = true, right_increasing = true;
  bool escapes = false;               // some sampled image leaves [-1, 1]
  double inf_abs_derivative = 0.0;    // sampled difference quotients
  double fit_residual = 0.0;          // reduction only
  double left_slope = 0.0, right_slope = 0.0;  // least-squares slopes per branch
  std::string source;

  Scalar operator()(const Scalar& y) const { return y < 0 ? left(y) : right(y); }
  bool continuous_at_zero(double tol = 1e-12) const {
    using std::abs;
    return static_cast<double>(abs(limit_plus - limit_minus)) <= tol;
  }
};

namespace detail {

inline void least_squares(const std::vector<double>& xs, const std::vector<double>& ys, double& slope) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
  const double denom = n * sxx - sx * sx;
  slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace detail

/// Fills limits, monotonicity flags, escape flag, inf |G'| and branch slopes
/// by sampling each branch at `samples` points.
template <typename Scalar>
IntervalMap1D<Scalar>& annotate(IntervalMap1D<Scalar>& G, int samples = 4096) {
  if (samples < 2) throw PreconditionError("annotate needs at least two samples per branch");
  G.limit_minus = G.left(Scalar(0));
  G.limit_plus = G.right(Scalar(0));
  double inf_d = std::numeric_limits<double>::infinity();
  bool escapes = false;
  const auto scan = [&](const std::function<Scalar(const Scalar&)>& f, double lo, double hi, bool& monotone,
                        bool& increasing, double& slope) {
    int ups = 0, downs = 0;
    std::vector<double> xs, ys;
    double prev_y = 0.0, prev_x = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double x = lo + (hi - lo) * i / samples;
      const double y = static_cast<double>(f(Scalar(x)));
      if (std::abs(y) > 1.0 + 1e-12) escapes = true;
      xs.push_back(x);
      ys.push_back(y);
      if (i > 0) {
        const double d = (y - prev_y) / (x - prev_x);
        if (d > 0) ++ups;
        if (d < 0) ++downs;
        inf_d = std::min(inf_d, std::abs(d));
      }
      prev_x = x, prev_y = y;
    }
    monotone = ups == 0 || downs == 0;
    increasing = ups >= downs;
    detail::least_squares(xs, ys, slope);
  };
  scan(G.left, -1.0, 0.0, G.left_monotone, G.left_increasing, G.left_slope);
  scan(G.right, 0.0, 1.0, G.right_monotone, G.right_increasing, G.right_slope);
  G.inf_abs_derivative = inf_d;
  G.escapes = escapes;
  return G;
}

/// G(y) = sl y + ol for y < 0, sr y + or for y >= 0.
template <typename Scalar = double>
IntervalMap1D<Scalar> piecewise_linear_map(double sl, double ol, double sr, double orr) {
  IntervalMap1D<Scalar> G;
  const Scalar a(sl), b(ol), c(sr), d(orr);
  G.left = [a, b](const Scalar& y) { return Scalar(a * y + b); };
  G.right = [c, d](const Scalar& y) { return Scalar(c * y + d); };
  G.source = "piecewise-linear";
  return annotate(G);
}

/// h o G o h^-1 for an increasing homeomorphism h of [-1, 1] fixing 0.
template <typename Scalar>
IntervalMap1D<Scalar> conjugate(const IntervalMap1D<Scalar>& G, std::function<Scalar(const Scalar&)> h,
                                std::function<Scalar(const Scalar&)> h_inv) {
  IntervalMap1D<Scalar> out;
  out.left = [=](const Scalar& y) { return h(G.left(h_inv(y))); };
  out.right = [=](const Scalar& y) { return h(G.right(h_inv(y))); };
  out.source = G.source + " (conjugated)";
  return annotate(out);
}

enum class Side { Plus, Minus };

constexpr char kZeroMarker = '*';
constexpr char kEscapeMarker = 'E';

/// Symbols of y0, G(y0), ...: 'L' for negative points, 'R' for positive. An
/// exact zero ends the string with '*', a point outside [-1, 1] with 'E'.
template <typename Scalar>
std::string itinerary(const IntervalMap1D<Scalar>& G, Scalar y, int N) {
  if (N < 1) throw PreconditionError("itinerary length N must be at least 1");
  std::string out;
  out.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    if (y == 0) {
      out.push_back(kZeroMarker);
      break;
    }
    if (y > 1 || y < -1) {
      out.push_back(kEscapeMarker);
      break;
    }
    out.push_back(y < 0 ? 'L' : 'R');
    y = G(y);
  }
  return out;
}

/// Itinerary of G(0+) (Plus) or G(0-) (Minus).
template <typename Scalar>
std::string kneading_sequence(const IntervalMap1D<Scalar>& G, Side side, int N) {
  if (N < 1) throw PreconditionError("kneading length N must be at least 1");
  return itinerary(G, side == Side::Plus ? G.limit_plus : G.limit_minus, N);
}

struct KneadingInvariant {
  std::string plus;
  std::string minus;
  int length = 0;
  std::string source;
  std::string arithmetic;
};

template <typename Scalar>
KneadingInvariant kneading_invariant(const IntervalMap1D<Scalar>& G, int N) {
  KneadingInvariant k;
  k.plus = kneading_sequence(G, Side::Plus, N);
  k.minus = kneading_sequence(G, Side::Minus, N);
  k.length = N;
  k.source = G.source;
  k.arithmetic = std::numeric_limits<Scalar>::digits10 > 20 ? "cpp_bin_float_50" : "double";
  return k;
}

/// "+ : ..." and "- : ..." lines.
std::string to_text(const KneadingInvariant& k);
nlohmann::json to_json(const KneadingInvariant& k);

/// Twisted lexicographic comparison of two itineraries. At the first
/// difference the order is L < * < R < E, reversed when an odd number of the
/// preceding symbols lie on orientation-reversing branches.
int compare_itineraries(const std::string& a, const std::string& b, bool left_reverses = false,
                        bool right_reverses = false);

struct KneadingComparison {
  bool equal = false;
  int plus_index = -1;   // first differing index, -1 if the sequences agree
  int minus_index = -1;
  int order = 0;         // twisted-lex order of the pairs (plus first, then minus)
};

/// Requires equal lengths.
KneadingComparison compare_kneading(const KneadingInvariant& a, const KneadingInvariant& b,
                                    bool left_reverses = false, bool right_reverses = false);

std::string to_text(const KneadingComparison& c);

/// True iff each branch image covers the core interval spanned by G(0+) and
/// G(0-). Throws PreconditionError when G is continuous at 0.
bool verify_two_full_branches(const IntervalMap1D<double>& G, int samples = 4096);

struct TransitionMatrix {
  Eigen::MatrixXi matrix;
  std::vector<double> boundaries;  // cell i is [boundaries[i], boundaries[i+1]]
  int depth = 0;
  int merged_cells = 0;
  double spectral_radius = 0.0;
  double entropy = 0.0;
  long iterations = 0;
  bool converged = true;
};

/// Partition of [-1, 1] by 0 and its preimages up to depth k; entry (i, j) is
/// 1 iff G(cell i) overlaps the interior of cell j by more than 1e-12.
TransitionMatrix build_transition_matrix(const IntervalMap1D<double>& G, int depth);

/// Spectral radius of a nonnegative integer matrix by power iteration on each
/// strongly connected block (with the identity shift), relative tolerance
/// 1e-12, at most 1e5 iterations per block.
double spectral_radius(const Eigen::MatrixXi& M, long* iterations = nullptr, bool* converged = nullptr);

void write_transition_csv(std::ostream& os, const TransitionMatrix& t);
nlohmann::json to_json(const TransitionMatrix& t);

struct ReductionSettings {
  int n_transient = 20;
  int n_fit = 50;
  int seeds = 64;
  std::uint64_t seed = 20240917ULL;
  int bins = 512;
  int max_reference = 256;
  double residual_threshold = 1e-3;  // relative to the span of [-1, 1]
};

/// Empirical y-map of a Lorenz-type planar return map: G(y) is the average of
/// g(x, y) over x-values sampled on the attractor. The fit residual is the
/// largest spread of g(x, y) over those x in any of `bins` bins per branch,
/// divided by the span 2.
///
/// Throws ReductionInvalidError when the map is not contracting in x on the
/// sampled grid or the residual exceeds the threshold.
IntervalMap1D<double> reduce_to_1d(const SystemModel& map, const ReductionSettings& settings = {});

}  // namespace chaoslab::symbolic
