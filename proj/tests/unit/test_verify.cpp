#include "doctest.h"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/verify/conditions.hpp"
#include "chaoslab/zoo/models.hpp"

#include <cmath>
#include <numbers>

using namespace chaoslab;
using namespace chaoslab::verify;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// (x, phi, z) -> (sx x, sx phi, sz z): g independent of z, f independent of (x, phi).
SystemModel decoupled_map(double sx, double sz) {
  SystemModel m;
  m.id = "decoupled";
  m.kind = ModelKind::Map;
  m.dimension = 3;
  m.domain = Domain::box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
  m.locus = Locus{0, 0.0};
  m.rule = [sx, sz](const Vector& s) {
    Vector o(3);
    o << sx * s[0], sx * s[1], sz * s[2];
    return o;
  };
  m.jacobian = [sx, sz](const Vector&) {
    Matrix j = Matrix::Zero(3, 3);
    j(0, 0) = sx;
    j(1, 1) = sx;
    j(2, 2) = sz;
    return j;
  };
  return m;
}

/// Smallest singular value of a 2x2 matrix as |det| / sigma_max, which avoids
/// cancellation for strongly anisotropic matrices.
double sigma_min_2x2(double a, double b, double c, double d) {
  const double frob = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double smax = std::sqrt((frob + std::sqrt(frob * frob - 4.0 * det * det)) / 2.0);
  return std::abs(det) / smax;
}

}  // namespace

TEST_CASE("Anosov: cat map passes, eigenvalues match the quadratic formula") {
  Matrix A(2, 2);
  A << 2, 1, 1, 1;
  const auto r = check_anosov_matrix(A);
  CHECK(r.all_hold());
  const double l1 = (3.0 + std::sqrt(5.0)) / 2.0;
  CHECK(r.derived.at("spectral_radius") == doctest::Approx(l1).epsilon(1e-12));
  CHECK(l1 == doctest::Approx(2.618).epsilon(1e-3));
  CHECK(1.0 / l1 == doctest::Approx(0.382).epsilon(1e-3));
}

TEST_CASE("Anosov: identity and parabolic matrices fail with witnesses") {
  const auto id = check_anosov_matrix(Matrix(Matrix::Identity(2, 2)));
  CHECK_FALSE(id.all_hold());
  CHECK_FALSE(id.at("hyperbolic").holds);
  CHECK(id.at("hyperbolic").witness_value == doctest::Approx(1.0));
  Matrix P(2, 2);
  P << 1, 1, 0, 1;
  CHECK_FALSE(check_anosov_matrix(P).at("hyperbolic").holds);
  CHECK(check_anosov_matrix(P).at("unimodular").holds);
  Matrix frac(2, 2);
  frac << 2, 0.5, 1, 1;
  CHECK_FALSE(check_anosov_matrix(frac).at("integer").holds);
  CHECK_THROWS_AS(check_anosov_matrix(Matrix(2, 3)), PreconditionError);
}

TEST_CASE("Anosov: agrees with the trace criterion on all small unimodular 2x2 matrices") {
  int tested = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d) {
          const int det = a * d - b * c;
          if (std::abs(det) != 1) continue;
          const int tr = a + d;
          // Roots of l^2 - tr l + det: det = 1 is hyperbolic iff |tr| > 2,
          // det = -1 iff tr != 0.
          const bool oracle = det == 1 ? std::abs(tr) > 2 : tr != 0;
          IntMatrix M(2, 2);
          M << a, b, c, d;
          CAPTURE(M);
          CHECK(check_anosov_matrix(M).all_hold() == oracle);
          ++tested;
        }
  CHECK(tested > 100);
}

TEST_CASE("Expansion: doubling, torus 2Id and a weak circle perturbation") {
  const auto dbl = check_expansion(zoo::make_doubling_map());
  CHECK(dbl.all_hold());
  CHECK(dbl.derived.at("sup_inverse_norm") == doctest::Approx(0.5));

  IntMatrix two(2, 2);
  two << 2, 0, 0, 2;
  const auto torus = check_expansion(zoo::make_torus_endomorphism(two), Grid{16});
  CHECK(torus.all_hold());
  CHECK(torus.derived.at("sup_inverse_norm") == doctest::Approx(0.5));

  // min |1 + 0.2 pi cos 2 pi theta| = 1 - 0.2 pi at theta = 1/2, which lies on the grid.
  const auto weak = check_expansion(zoo::make_circle_family(1, zoo::CircleFunction::sine(0.1), 0.0));
  CHECK_FALSE(weak.all_hold());
  CHECK(weak.at("expansion").witness_value == doctest::Approx(1.0 / (1.0 - 0.2 * kPi)));
  CHECK(weak.at("expansion").witness_point[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(check_expansion(zoo::make_wild_map()), PreconditionError);
}

TEST_CASE("Expansion: singular derivative reports an infinite witness") {
  const auto flat = zoo::make_circle_family(1, zoo::CircleFunction::sine(1.0 / (2 * kPi)), 0.0);
  const auto r = check_expansion(flat);
  CHECK_FALSE(r.all_hold());
  CHECK(std::isinf(r.at("expansion").witness_value));
}

TEST_CASE("Lorenz conditions: decoupled map passes and q = 2") {
  zoo::PiecewiseLinearLorenzParams p;
  p.fx = 0.0;
  const auto r = check_lorenz_conditions(zoo::make_piecewise_linear_lorenz(p));
  CHECK(r.all_hold());
  CHECK(r.derived.at("sup_fx") == 0.0);
  CHECK(r.at("b").witness_value == doctest::Approx(1.0));
  CHECK(compute_q(r) == doctest::Approx(2.0));
  CHECK(compute_q(LorenzNorms{0.5, 0.0, 0.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("Lorenz conditions: piecewise-linear benchmark against closed-form sups") {
  const auto r = check_lorenz_conditions(zoo::make_piecewise_linear_lorenz());
  CHECK(r.all_hold());
  CHECK(r.derived.at("sup_fx") == doctest::Approx(0.4));
  CHECK(r.derived.at("sup_gy_inv") == doctest::Approx(0.5));
  CHECK(r.derived.at("sup_gx") == 0.0);
  CHECK(r.derived.at("sup_gy_inv_fy") == 0.0);
  CHECK(r.derived.at("q") == doctest::Approx(1.2 + std::sqrt(0.9)));
  CHECK(r.derived.at("q_squared") == doctest::Approx(2.0));
}

TEST_CASE("Lorenz conditions: violator fails (a) with a witness next to S") {
  zoo::GeomLorenzParams p;
  p.alpha = 0.5;
  p.A1 = 0.05;
  // phi1 = A1 (1 + x / y) so that f_x = A1 y^(alpha - 1) grows toward y = 0.
  const double A1 = p.A1;
  p.phi1 = zoo::CorrectionHandle{[A1](double x, double y) { return A1 * (1.0 + x / y); },
                                 [A1](double, double y) { return A1 / y; },
                                 [A1](double x, double y) { return -A1 * x / (y * y); }};
  const auto model = zoo::make_geometric_lorenz(p);
  const auto r = check_lorenz_conditions(model);
  const auto& a = r.at("a");
  CHECK_FALSE(a.holds);
  CHECK(a.witness_value > 1.0);
  CHECK(std::abs(a.witness_point[1]) < 0.01);
  // Re-evaluating at the witness confirms the violation.
  CHECK(std::abs(jacobian_at(model, a.witness_point).matrix(0, 0)) > 1.0);
  CHECK_THROWS_AS(compute_q(r), PreconditionError);
}

TEST_CASE("Lorenz conditions: failing (c) is reported and q refuses") {
  zoo::PiecewiseLinearLorenzParams p;
  p.gy = 0.5;
  const auto r = check_lorenz_conditions(zoo::make_piecewise_linear_lorenz(p));
  CHECK_FALSE(r.at("c").holds);
  CHECK(r.at("c").witness_value == doctest::Approx(2.0));
  CHECK_THROWS_AS(compute_q(r), PreconditionError);
  CHECK_THROWS_AS(compute_q(LorenzNorms{2.0, 0.0, 0.0, 0.0}), PreconditionError);
}

TEST_CASE("compute_q: hand evaluation and negative radicand") {
  // a = 0.5, b = 0.1, c = d = 0: (1 + 0.05 + sqrt(1 - 0.025)) / 1.
  const double by_hand = 1.05 + std::sqrt(0.975);
  CHECK(compute_q(LorenzNorms{0.5, 0.1, 0.0, 0.0}) == doctest::Approx(by_hand).epsilon(1e-14));
  CHECK(compute_q(LorenzNorms{0.5, 0.1, 0.0, 0.0}, QVariant::Squared) == doctest::Approx(2.0));
  CHECK_THROWS_AS(compute_q(LorenzNorms{0.9, 0.9, 1.0, 1.0}), ConditionInconsistencyError);
}

TEST_CASE("compute_q: q > 1 for random admissible sup tuples") {
  auto rng = make_rng(42, 0);
  int accepted = 0;
  for (int trial = 0; trial < 20000 && accepted < 2000; ++trial) {
    const double a = uniform(rng, 0.01, 0.99), b = uniform(rng, 0.0, 0.99);
    const double c = uniform(rng, 0.0, 2.0), d = uniform(rng, 0.0, 2.0);
    const bool cond_b = (1 - a * b) - 2 * std::sqrt(a * c * d) >= 0.01;
    const bool cond_d = (1 - b) * (1 - a) - c * d >= 0.01;
    if (!(cond_b && cond_d && b <= 0.99 && a <= 0.99)) continue;
    ++accepted;
    const LorenzNorms n{a, b, c, d};
    CHECK(compute_q(n) > 1.0);
    CHECK(compute_q(n, QVariant::Squared) > 1.0);
    CHECK(compute_q(n) >= compute_q(n, QVariant::Squared));
  }
  CHECK(accepted >= 500);
}

TEST_CASE("Lorenz conditions: sups do not decrease under grid doubling") {
  const auto model = zoo::make_geometric_lorenz();
  double prev_fx = 0, prev_a = 0, prev_d = 0;
  for (int n : {16, 32, 64, 128}) {
    Grid g;
    g.n = n;
    const auto r = check_lorenz_conditions(model, g);
    CHECK(r.derived.at("sup_fx") >= prev_fx);
    CHECK(r.derived.at("sup_gy_inv") >= prev_a);
    CHECK(r.derived.at("sup_gy_inv_fy") >= prev_d);
    prev_fx = r.derived.at("sup_fx");
    prev_a = r.derived.at("sup_gy_inv");
    prev_d = r.derived.at("sup_gy_inv_fy");
  }
}

TEST_CASE("Lorenz conditions: thread count does not change the report") {
  const auto model = zoo::make_geometric_lorenz();
  Grid g1, g3;
  g3.threads = 3;
  CHECK(to_json(check_lorenz_conditions(model, g1)) == to_json(check_lorenz_conditions(model, g3)));
}

TEST_CASE("Saddle-focus gap") {
  const auto ok = check_saddle_focus_gap({1.0, 0.4, 1.0, {0.6}});
  CHECK(ok.all_hold());
  CHECK(ok.derived.at("rho") == doctest::Approx(0.4));
  const auto edge = check_saddle_focus_gap({1.0, 0.5, 1.0, {0.6}});
  CHECK_FALSE(edge.at("gap").holds);
  CHECK_FALSE(edge.at("rho").holds);
  CHECK(edge.at("ordering").holds);
  const auto order = check_saddle_focus_gap({1.0, 0.7, 1.0, {0.6}});
  CHECK_FALSE(order.at("ordering").holds);
  CHECK_FALSE(check_saddle_focus_gap({1.0, 0.4, 0.0, {0.6}}).at("rotation").holds);
}

TEST_CASE("Block derivatives: decoupled and wild examples") {
  const auto b = block_derivatives(decoupled_map(2.0, 0.5), vec({0.3, 0.1, 0.2}));
  CHECK(b.A(0, 0) == doctest::Approx(0.5));
  CHECK(b.B.norm() == 0.0);
  CHECK(b.C.norm() == 0.0);
  CHECK((b.D - 0.5 * Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));

  const auto wild = zoo::make_wild_map();
  const auto w = block_derivatives(wild, vec({1.0, 0.0, 0.0}));
  CHECK(w.C.norm() == 0.0);
  // det dg/d(x,phi) = a b rho |x|^(2 rho) / x.
  CHECK(w.det_gu == doctest::Approx(0.9 * 3.0 * 0.4));
}

TEST_CASE("Block derivatives: finite differences agree with analytic blocks") {
  const auto wild = zoo::make_wild_map();
  auto fd = wild;
  fd.jacobian = nullptr;
  auto rng = make_rng(5, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double sgn = uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
    const Vector s = vec({sgn * uniform(rng, 0.2, 1.0), uniform(rng, 0, 2 * kPi), uniform(rng, -1, 1)});
    const auto a = block_derivatives(wild, s), f = block_derivatives(fd, s);
    worst = std::max({worst, (a.A - f.A).cwiseAbs().maxCoeff(), (a.B - f.B).cwiseAbs().maxCoeff(),
                      (a.C - f.C).cwiseAbs().maxCoeff(), (a.D - f.D).cwiseAbs().maxCoeff()});
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("Block derivatives: singular dg/d(x,phi)") {
  auto m = decoupled_map(2.0, 0.5);
  m.jacobian = [](const Vector&) {
    Matrix j = Matrix::Zero(3, 3);
    j(1, 1) = 1.0;
    j(2, 2) = 0.5;
    return j;
  };
  CHECK_THROWS_AS(block_derivatives(m, vec({0.5, 0.0, 0.0})), SingularBlockError);
  Grid g;
  g.n = 8;
  const auto r = check_pseudohyperbolic(m, g);
  CHECK_FALSE(r.at("ct0").holds);
}

TEST_CASE("Pseudo-hyperbolicity: decoupled contraction passes, isometric fiber fails ct3") {
  Grid g;
  g.n = 8;
  const auto r = check_pseudohyperbolic(decoupled_map(2.0, 0.5), g);
  for (const char* id : {"ct0", "ct2", "ct3", "ct5"}) {
    CAPTURE(id);
    CHECK(r.at(id).holds);
  }
  CHECK(r.at("ct3").witness_value == doctest::Approx(0.5));

  const auto iso = check_pseudohyperbolic(decoupled_map(2.0, 1.0), g);
  const auto& ct3 = iso.at("ct3");
  CHECK_FALSE(ct3.holds);
  CHECK(ct3.witness_value == doctest::Approx(1.0));
  CHECK(block_derivatives(decoupled_map(2.0, 1.0), ct3.witness_point).A.norm() == doctest::Approx(1.0));
}

TEST_CASE("Pseudo-hyperbolicity: wild example map") {
  const auto wild = zoo::make_wild_map();
  Grid g;
  g.n = 32;
  const auto r = check_pseudohyperbolic(wild, g, 0.45);
  for (const char* id : {"ct0", "ct2", "ct3", "ct4", "ct5"}) {
    CAPTURE(id);
    CHECK(r.at(id).holds);
  }
  CHECK(r.derived.at("sup_C") == 0.0);
  CHECK(r.derived.at("sup_A") == doctest::Approx(0.1));
  CHECK(r.derived.at("sup_sqrt_detD") == doctest::Approx(1.0 / std::sqrt(0.9 * 3.0 * 0.4)).epsilon(1e-6));

  // |A||D| along |x| = 2^-k: independent closed form, sup over a fine phi sweep.
  const auto& seq = r.series.at("sup_AD");
  const auto& xs = r.series.at("abs_x");
  REQUIRE(seq.size() == 20);
  for (std::size_t k = 1; k < seq.size(); ++k) CHECK(seq[k] < seq[k - 1]);
  const double x = xs.back(), rho = 0.4, eta = 0.5;
  double oracle = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double phi = 2 * kPi * i / 32;
    const double th = std::log(x) + phi, r0 = std::pow(x, rho);
    const double s = sigma_min_2x2(0.9 * r0 / x * (rho * std::cos(th) - std::sin(th)), -0.9 * r0 * std::sin(th),
                                   3.0 * r0 / x * (rho * std::sin(th) + std::cos(th)), 3.0 * r0 * std::cos(th));
    oracle = std::max(oracle, 0.1 * std::pow(x, eta) / s);
  }
  CHECK(seq.back() == doctest::Approx(oracle).epsilon(1e-6));
  // The product decays only like |x|^(eta - rho), so 20 halvings leave it far above 1e-3.
  CHECK(r.derived.at("ct1_AD_decay_exponent") == doctest::Approx(eta - rho).epsilon(0.2));
  CHECK(seq.back() > 1e-3);
  CHECK_FALSE(r.at("ct1").holds);

  CHECK_THROWS_AS(check_pseudohyperbolic(wild, g, 0.3), PreconditionError);
}

TEST_CASE("Report JSON shape") {
  const auto r = check_lorenz_conditions(zoo::make_piecewise_linear_lorenz(), Grid{16});
  const auto j = to_json(r);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 4);
  for (const auto& e : j) {
    CHECK(e.contains("condition"));
    CHECK(e["holds"].is_boolean());
    CHECK(e["witness_point"].size() == 2);
    CHECK(e["grid"]["n"] == 16);
    CHECK(e["grid"]["delta"] == 1e-4);
    CHECK(e["derived"].contains("q"));
  }
}
