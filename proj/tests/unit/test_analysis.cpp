#include "doctest.h"

#include "chaoslab/analysis/cells.hpp"
#include "chaoslab/analysis/dimension.hpp"
#include "chaoslab/analysis/lyapunov.hpp"
#include "chaoslab/analysis/periodic.hpp"
#include "chaoslab/analysis/recurrence.hpp"
#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/zoo/models.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace chaoslab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// Middle-thirds Cantor points: 12 random ternary digits in {0, 2}, then uniform below 3^-12.
std::vector<double> cantor_points(std::size_t count, std::uint64_t seed) {
  auto rng = make_rng(seed, 0);
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    double x = 0.0, scale = 1.0;
    for (int d = 0; d < 12; ++d) {
      scale /= 3.0;
      if (rng() & 1) x += 2.0 * scale;
    }
    out.push_back(x + uniform(rng, 0.0, scale));
  }
  return out;
}

/// x -> x / 2 on [-1, 1]^2.
SystemModel halving_map() {
  SystemModel m;
  m.id = "halving";
  m.kind = ModelKind::Map;
  m.dimension = 2;
  m.domain = Domain::box({{-1.0, 1.0}, {-1.0, 1.0}});
  m.rule = [](const Vector& s) { return Vector(0.5 * s); };
  m.jacobian = [](const Vector&) { return Matrix(0.5 * Matrix::Identity(2, 2)); };
  return m;
}

double golden_conjugate() { return (std::sqrt(5.0) - 1.0) / 2.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Lyapunov spectra

TEST_CASE("lyapunov: cat map matches the log eigenvalues") {
  Eigen::Matrix2d A;
  A << 2, 1, 1, 1;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
  const double oracle = std::log(es.eigenvalues().cwiseAbs().maxCoeff());
  LyapunovSettings st;
  st.duration = 1e4;
  const auto r = lyapunov_spectrum(zoo::make_cat_map(), vec({0.1, 0.2}), st);
  REQUIRE(r.exponents.size() == 2);
  CHECK(std::abs(r.exponents[0] - oracle) < 1e-3);
  CHECK(std::abs(r.exponents[1] + oracle) < 1e-3);
  CHECK(std::abs(r.sum()) < 1e-6);
  CHECK(r.converged);
}

TEST_CASE("lyapunov: doubling map gives ln 2") {
  LyapunovSettings st;
  st.duration = 2000;
  const auto r = lyapunov_spectrum(zoo::make_doubling_map(), vec({0.123}), st);
  CHECK(std::abs(r.exponents[0] - std::log(2.0)) < 1e-6);
}

TEST_CASE("lyapunov: classic Lorenz sum and zero exponent") {
  LyapunovSettings st;
  st.duration = 1000;
  st.transient = 10;
  const auto r = lyapunov_spectrum(zoo::make_lorenz(), vec({1.0, 1.0, 20.0}), st);
  REQUIRE(r.exponents.size() == 3);
  CHECK(std::abs(r.sum() + 41.0 / 3.0) < 0.02 * 41.0 / 3.0);
  CHECK(std::abs(r.exponents[1]) < 0.02);
  CHECK(r.exponents[0] > 0.5);
  CHECK(r.history.size() == 100);
  CHECK(r.history_time.back() == doctest::Approx(1000.0));
  CHECK(r.final_drift < st.drift_bound);
  const auto j = to_json(r);
  CHECK(j["history"].size() == 100);
  CHECK(j["settings"]["renorm_interval"] == 1.0);
}

TEST_CASE("lyapunov: Lorenz sum equals the divergence for other parameters") {
  auto rng = make_rng(11, 0);
  for (int trial = 0; trial < 3; ++trial) {
    zoo::LorenzParams p{uniform(rng, 5, 15), uniform(rng, 20, 40), uniform(rng, 1, 4)};
    LyapunovSettings st;
    st.duration = 1000;
    st.transient = 10;
    const auto r = lyapunov_spectrum(zoo::make_lorenz(p), vec({1.0, 1.0, 20.0}), st);
    const double div = -(p.sigma + 1.0 + p.b);
    CAPTURE(p.sigma);
    CAPTURE(p.r);
    CHECK(std::abs(r.sum() - div) < 0.02 * std::abs(div));
  }
}

TEST_CASE("lyapunov: hyperbolic torus automorphisms preserve volume") {
  auto rng = make_rng(12, 0);
  int tested = 0;
  while (tested < 5) {
    IntMatrix A(2, 2);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = static_cast<long>(std::floor(uniform(rng, -3, 4)));
    const long det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    const long tr = A(0, 0) + A(1, 1);
    // Hyperbolic iff |tr| > 2 (det 1) or tr != 0 (det -1).
    if (std::labs(det) != 1 || (det == 1 && std::labs(tr) <= 2) || (det == -1 && tr == 0)) continue;
    LyapunovSettings st;
    st.duration = 2000;
    const auto r = lyapunov_spectrum(zoo::make_torus_automorphism(A), vec({0.3, 0.7}), st);
    CHECK(std::abs(r.sum()) < 1e-6);
    ++tested;
  }
}

TEST_CASE("lyapunov: preconditions and termination") {
  LyapunovSettings st;
  st.exponents = 3;
  CHECK_THROWS_AS(lyapunov_spectrum(zoo::make_cat_map(), vec({0.1, 0.2}), st), PreconditionError);
  st.exponents = 0;
  st.duration = -1;
  CHECK_THROWS_AS(lyapunov_spectrum(zoo::make_cat_map(), vec({0.1, 0.2}), st), PreconditionError);
  // Starting on the discontinuity stops the run and says so.
  LyapunovSettings ok;
  ok.duration = 100;
  const auto r = lyapunov_spectrum(zoo::make_piecewise_linear_lorenz(), vec({0.0, 0.0}), ok);
  CHECK(r.termination == Termination::LocusHit);
  CHECK_FALSE(r.converged);
}

// ---------------------------------------------------------------------------
// Box counting

TEST_CASE("box counting: segment has dimension 1") {
  auto rng = make_rng(21, 0);
  std::vector<Vector> pts;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform(rng, 0.0, 1.0);
    pts.push_back(vec({u, 0.5 * u}));
  }
  const auto r = box_counting_dimension(pts);
  CHECK(std::abs(r.dimension - 1.0) < 0.05);
  CHECK_FALSE(r.degenerate);
  CHECK(r.counts.size() >= 4);
}

TEST_CASE("box counting: middle-thirds Cantor set") {
  std::vector<Vector> pts;
  for (double x : cantor_points(100000, 22)) pts.push_back(vec({x}));
  const auto r = box_counting_dimension(pts, ScaleRange{1, 15});
  CHECK(std::abs(r.dimension - std::log(2.0) / std::log(3.0)) < 0.03);
}

TEST_CASE("box counting: product of segment and Cantor set adds dimensions") {
  const auto c = cantor_points(400000, 23);
  auto rng = make_rng(24, 0);
  std::vector<Vector> pts;
  for (double x : c) pts.push_back(vec({uniform(rng, 0.0, 1.0), x}));
  const auto r = box_counting_dimension(pts, ScaleRange{1, 8});
  CHECK(std::abs(r.dimension - (1.0 + std::log(2.0) / std::log(3.0))) < 0.1);
}

TEST_CASE("box counting: preconditions and thread invariance") {
  std::vector<Vector> few(100, vec({0.0, 1.0}));
  CHECK_THROWS_AS(box_counting_dimension(few), PreconditionError);
  auto rng = make_rng(25, 0);
  std::vector<Vector> pts;
  for (int i = 0; i < 20000; ++i) pts.push_back(vec({uniform(rng, 0, 1), uniform(rng, 0, 1)}));
  CHECK_THROWS_AS(box_counting_dimension(pts, ScaleRange{2, 4}), PreconditionError);
  const auto a = box_counting_dimension(pts, ScaleRange{1, 6}, 1);
  const auto b = box_counting_dimension(pts, ScaleRange{1, 6}, 3);
  CHECK(a.counts == b.counts);
  CHECK(a.dimension == b.dimension);
  CHECK(std::abs(a.dimension - 2.0) < 0.05);
}

// ---------------------------------------------------------------------------
// Recurrence

TEST_CASE("recurrence: golden rotation has at most three gaps") {
  const auto rot = zoo::make_circle_family(1, zoo::CircleFunction::zero(), golden_conjugate());
  const Orbit orbit = iterate_map(rot, vec({0.0}), 100000);
  const auto r = recurrence_times(orbit, vec({0.1}), 0.01, rot.domain);
  // Independent census of integer gaps.
  std::set<long> census;
  for (double g : r.gaps) census.insert(std::lround(g));
  CHECK(census.size() <= 3);
  CHECK(r.distinct_gaps().size() == census.size());
  CHECK(r.entry_times.size() > 100);
}

TEST_CASE("recurrence: periodic orbit returns every period") {
  const auto rot = zoo::make_circle_family(1, zoo::CircleFunction::zero(), 0.2);
  const Orbit orbit = iterate_map(rot, vec({0.05}), 1000);
  const auto r = recurrence_times(orbit, vec({0.05}), 0.01, rot.domain);
  for (double g : r.gaps) CHECK(g == 5.0);
}

TEST_CASE("recurrence: Lorenz return gaps grow with orbit length") {
  const auto lor = zoo::make_lorenz();
  StepSettings st;
  st.dt = 0.01;
  const Orbit warm = integrate_flow(lor, vec({1.0, 1.0, 20.0}), 50.0, st);
  const State center = warm.back();
  const Orbit shorter = integrate_flow(lor, center, 200.0, st);
  const Orbit longer = integrate_flow(lor, center, 2000.0, st);
  const auto a = recurrence_times(shorter, center, 1.0, lor.domain);
  const auto b = recurrence_times(longer, center, 1.0, lor.domain);
  CHECK(b.max_gap() > a.max_gap());
}

TEST_CASE("recurrence: too few visits") {
  const auto rot = zoo::make_circle_family(1, zoo::CircleFunction::zero(), 0.2);
  const Orbit orbit = iterate_map(rot, vec({0.0}), 100);
  CHECK_THROWS_AS(recurrence_times(orbit, vec({0.1}), 0.01, rot.domain), InsufficientRecurrenceError);
  CHECK_THROWS_AS(recurrence_times(orbit, vec({0.1}), 0.0, rot.domain), PreconditionError);
}

// ---------------------------------------------------------------------------
// Periodic points

TEST_CASE("periodic: doubling map period 4 gives the fifteen points k/15") {
  const auto recs = find_periodic_points(zoo::make_doubling_map(), 4);
  REQUIRE(recs.size() == 15);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(std::abs(recs[k].point[0] - k / 15.0) < 1e-12);
    REQUIRE(recs[k].multipliers.size() == 1);
    CHECK(std::abs(recs[k].multipliers[0] - std::complex<double>(16.0, 0.0)) < 1e-9);
    CHECK(recs[k].stability == Stability::Repelling);
  }
  CHECK(recs[0].minimal_period == 1);
  CHECK(recs[5].minimal_period == 2);  // 1/3
  CHECK(recs[1].minimal_period == 4);
}

TEST_CASE("periodic: exhaustive counts for expanding circle maps") {
  for (int n = 1; n <= 8; ++n) CHECK(find_periodic_points(zoo::make_doubling_map(), n).size() == (1u << n) - 1);
  // Orientation-reversing degree -2: 3 fixed points.
  const auto rev = zoo::make_circle_family(-2, zoo::CircleFunction::zero(), 0.0);
  CHECK(find_periodic_points(rev, 1).size() == 3);
  // A perturbed degree-3 map still has 3^n - 1 points of period n.
  const auto cubic = zoo::make_circle_family(3, zoo::CircleFunction::sine(0.1), 0.37);
  CHECK(find_periodic_points(cubic, 3).size() == 26);
}

TEST_CASE("periodic: cat map fixed point is a saddle") {
  PeriodicSearchSettings st;
  st.seeds = 200;
  const auto recs = find_periodic_points(zoo::make_cat_map(), 1, st);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].point.norm() < 1e-9);
  CHECK(std::abs(recs[0].multipliers[0].real() - (3 + std::sqrt(5.0)) / 2) < 1e-9);
  CHECK(std::abs(recs[0].multipliers[1].real() - (3 - std::sqrt(5.0)) / 2) < 1e-9);
  CHECK(recs[0].stability == Stability::Saddle);
}

TEST_CASE("periodic: contraction has one attracting fixed point that re-verifies") {
  const auto map = zoo::make_circle_family(0, zoo::CircleFunction::sine(0.1), 0.3);
  PeriodicSearchSettings st;
  st.seeds = 50;
  const auto recs = find_periodic_points(map, 1, st);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].stability == Stability::Attracting);
  CHECK(reverify_attracting(map, recs[0]));
  CHECK(to_json(recs[0])["stability"] == "attracting");
}

TEST_CASE("periodic: wild map has no attracting orbits of low period") {
  PeriodicSearchSettings st;
  st.seeds = 200;
  const auto wild = zoo::make_wild_map();
  for (int n = 1; n <= 3; ++n)
    for (const auto& r : find_periodic_points(wild, n, st)) CHECK(r.stability != Stability::Attracting);
}

TEST_CASE("periodic: unit multipliers are neutral saddles") {
  const auto id = zoo::make_torus_automorphism(IntMatrix::Identity(2, 2));
  PeriodicOrbitRecord r;
  r.period = 1;
  r.point = vec({0.3, 0.4});
  classify(id, r);
  CHECK(r.stability == Stability::Saddle);
  CHECK(r.neutral);
  CHECK_THROWS_AS(find_periodic_points(id, 0), PreconditionError);
  CHECK_THROWS_AS(find_periodic_points(zoo::make_lorenz(), 1), PreconditionError);
}

// ---------------------------------------------------------------------------
// Cell graphs and chain attractors

TEST_CASE("cells: contracting map collapses onto the origin block") {
  const auto m = halving_map();
  CellGraphSettings st;
  st.h = 0.125;
  st.eps = 0.05;
  st.tau = 1;
  const auto g = build_cell_graph(m, vec({-1, -1}), vec({1, 1}), st);
  CHECK(g.cell_count() == 256);
  for (long c = 0; c < g.cell_count(); ++c) CHECK(!g.edges[c].empty());
  const auto a = chain_attractor(g, 0);
  CHECK(std::binary_search(a.cells.begin(), a.cells.end(), g.cell_of(vec({0.01, 0.01}))));
  for (long c : a.cells) CHECK(g.cell_center(c).lpNorm<Eigen::Infinity>() <= st.h);
  CHECK_FALSE(a.touches_boundary);
  CHECK(a.components == 1);
}

TEST_CASE("cells: rigid rotation graph is strongly connected") {
  const auto rot = zoo::make_circle_family(1, zoo::CircleFunction::zero(), golden_conjugate());
  CellGraphSettings st;
  st.h = 1.0 / 64;
  st.eps = 0.005;
  st.tau = 1;
  const auto g = build_cell_graph(rot, vec({0.0}), vec({1.0}), st);
  REQUIRE(g.wraps[0]);
  const auto a = chain_attractor(g, 17);
  CHECK(a.cells.size() == 64);
  CHECK(a.reachable == 64);
  CHECK_FALSE(a.touches_boundary);
}

TEST_CASE("cells: solid-torus chain attractor hugs the solenoid") {
  zoo::SolidTorusParams p;
  const auto map = zoo::make_solid_torus_map(p);
  CellGraphSettings st;
  st.h = 1.0 / 16;
  st.eps = st.h / 2;
  st.tau = 1;
  st.samples_per_cell = 4;
  const auto g = build_cell_graph(map, vec({-1, -1, 0}), vec({1, 1, 1}), st);
  const auto a = chain_attractor(g, g.cell_of(vec({0.0, 0.0, 0.5})));
  REQUIRE(!a.cells.empty());

  // Many short orbits: a single long one collapses onto theta = 0 because
  // doubling is exact in binary arithmetic.
  std::vector<State> pts;
  for (int k = 0; k < 2000; ++k) {
    auto rng = make_rng(31, k);
    const Orbit o = iterate_map(map, vec({uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, 0, 1)}), 40);
    pts.insert(pts.end(), o.states.begin() + 20, o.states.end());
  }
  // Hausdorff distance between cell centres and the orbit cloud.
  double worst_cell = 0.0;
  for (long c : a.cells) {
    double best = std::numeric_limits<double>::infinity();
    const Vector x = g.cell_center(c);
    for (const auto& q : pts) best = std::min(best, map.domain.difference(q, x).norm());
    worst_cell = std::max(worst_cell, best);
  }
  double worst_point = 0.0;
  std::vector<Vector> centers;
  for (long c : a.cells) centers.push_back(g.cell_center(c));
  for (std::size_t i = 0; i < pts.size(); i += 5) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : centers) best = std::min(best, map.domain.difference(pts[i], x).norm());
    worst_point = std::max(worst_point, best);
  }
  CHECK(worst_cell < 2 * st.h);
  CHECK(worst_point < 2 * st.h);

  // Halving eps can only shrink the attractor.
  CellGraphSettings half = st;
  half.eps = st.eps / 2;
  const auto g2 = build_cell_graph(map, vec({-1, -1, 0}), vec({1, 1, 1}), half);
  const auto a2 = chain_attractor(g2, g2.cell_of(vec({0.0, 0.0, 0.5})));
  CHECK(std::includes(a.cells.begin(), a.cells.end(), a2.cells.begin(), a2.cells.end()));
}

TEST_CASE("cells: stretch grid catches the saddle's long images") {
  const auto lor = zoo::make_lorenz();
  CellGraphSettings st;
  st.h = 1;
  st.eps = 0.5;
  st.tau = 0.5;
  st.step.dt = 0.02;
  const Vector lo = vec({-2, -2, 0}), hi = vec({2, 2, 4});
  const auto adaptive = build_cell_graph(lor, lo, hi, st);
  st.adaptive = false;
  const auto plain = build_cell_graph(lor, lo, hi, st);
  for (long c = 0; c < adaptive.cell_count(); ++c)
    CHECK(std::includes(adaptive.edges[c].begin(), adaptive.edges[c].end(), plain.edges[c].begin(),
                        plain.edges[c].end()));

  // Dense oracle: the cell holding the true image of every point of a fine
  // grid must be a successor.
  long missed_adaptive = 0, missed_plain = 0;
  const int k = 8;
  for (long c = 0; c < adaptive.cell_count(); ++c) {
    const Vector clo = adaptive.cell_lo(c);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int d = 0; d < k; ++d) {
          const State p = clo + (vec({a + 0.5, b + 0.5, d + 0.5}) / k);
          const long j = adaptive.cell_of(integrate_flow(lor, p, st.tau, st.step).back());
          if (j < 0) continue;
          missed_adaptive += !std::binary_search(adaptive.edges[c].begin(), adaptive.edges[c].end(), j);
          missed_plain += !std::binary_search(plain.edges[c].begin(), plain.edges[c].end(), j);
        }
  }
  CHECK(missed_adaptive == 0);
  CHECK(missed_plain > 0);
}

TEST_CASE("cells: resolution cap, preconditions and exports") {
  CellGraphSettings st;
  st.h = 0.01;
  CHECK_THROWS_AS(build_cell_graph(zoo::make_lorenz(), vec({-25, -25, 0}), vec({25, 25, 50}), st),
                  ResolutionTooFineError);
  st.h = -1;
  CHECK_THROWS_AS(build_cell_graph(halving_map(), vec({-1, -1}), vec({1, 1}), st), PreconditionError);
  CellGraphSettings ok;
  ok.h = 1.0;
  ok.eps = 0.1;
  ok.tau = 1;
  ok.samples_per_cell = 2;
  const auto g = build_cell_graph(halving_map(), vec({-1, -1}), vec({1, 1}), ok);
  CHECK_THROWS_AS(chain_attractor(g, 4), PreconditionError);
  std::ostringstream e, c;
  write_edges_csv(e, g);
  CHECK(e.str().rfind("src,dst\n", 0) == 0);
  write_cells_csv(c, g, {0});
  CHECK(c.str() == "cell_index,x0_lo,x0_hi,x1_lo,x1_hi\n0,-1,0,-1,0\n");
  const auto again = build_cell_graph(halving_map(), vec({-1, -1}), vec({1, 1}), ok);
  CHECK(again.edges == g.edges);
  ok.threads = 3;
  CHECK(build_cell_graph(halving_map(), vec({-1, -1}), vec({1, 1}), ok).edges == g.edges);
}
