#include "chaoslab/zoo/models.hpp"

#include "chaoslab/core/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace chaoslab::zoo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

long integer_determinant(const IntMatrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw PreconditionError("torus map matrix must be square and non-empty");
  return std::lround(A.cast<double>().determinant());
}

}  // namespace

SystemModel make_lorenz(const LorenzParams& p) {
  if (!(p.sigma > 0.0 && p.r > 0.0 && p.b > 0.0))
    throw PreconditionError("Lorenz parameters sigma, r, b must be strictly positive");
  SystemModel m;
  m.id = "lorenz";
  m.kind = ModelKind::Flow;
  m.dimension = 3;
  m.params = {{"sigma", p.sigma}, {"r", p.r}, {"b", p.b}};
  m.domain = Domain::unbounded(3);
  m.tags = {"symmetry:(x,y,z)->(-x,-y,z)"};
  m.rule = [p](const Vector& s) {
    Vector d(3);
    d << p.sigma * (s[1] - s[0]), p.r * s[0] - s[1] - s[0] * s[2], s[0] * s[1] - p.b * s[2];
    return d;
  };
  m.jacobian = [p](const Vector& s) {
    Matrix j(3, 3);
    j << -p.sigma, p.sigma, 0.0,
         p.r - s[2], -1.0, -s[0],
         s[1], s[0], -p.b;
    return j;
  };
  return m;
}

SystemModel make_saddle_node_flow(const SaddleNodeParams& p) {
  const long ny = p.C.rows();
  if (p.C.cols() != ny) throw PreconditionError("C must be square");
  if (ny > 0) {
    Eigen::EigenSolver<Matrix> es(p.C, false);
    if ((es.eigenvalues().real().array() >= 0.0).any())
      throw PreconditionError("C must be stable (all eigenvalues with negative real part)");
  }
  const long nt = p.Omega.size();
  SystemModel m;
  m.id = "saddle_node";
  m.kind = ModelKind::Flow;
  m.dimension = static_cast<int>(ny + 1 + nt);
  m.params = {{"mu", p.mu}};
  for (long i = 0; i < nt; ++i) m.params["Omega" + std::to_string(i)] = p.Omega[i];
  m.domain = Domain::unbounded(m.dimension);
  for (long i = 0; i < nt; ++i) m.domain.axes[ny + 1 + i] = Axis{0.0, 1.0, 1.0};
  m.rule = [p, ny, nt](const Vector& s) {
    Vector d(s.size());
    if (ny > 0) d.head(ny) = p.C * s.head(ny);
    d[ny] = p.mu + s[ny] * s[ny];
    d.tail(nt) = p.Omega;
    return d;
  };
  m.jacobian = [p, ny](const Vector& s) {
    Matrix j = Matrix::Zero(s.size(), s.size());
    if (ny > 0) j.topLeftCorner(ny, ny) = p.C;
    j(ny, ny) = 2.0 * s[ny];
    return j;
  };
  return m;
}

std::vector<double> saddle_node_equilibria(double mu) {
  if (mu > 0.0) return {};
  if (mu == 0.0) return {0.0};
  const double r = std::sqrt(-mu);
  return {-r, r};
}

SystemModel make_torus_endomorphism(const IntMatrix& A, const TorusPerturbation& g) {
  const long det = integer_determinant(A);
  if (std::labs(det) < 1)
    throw PreconditionError("torus endomorphism needs |det A| >= 1 (got 0)");
  const int n = static_cast<int>(A.rows());
  const Matrix Ad = A.cast<double>();
  SystemModel m;
  m.id = "torus_endomorphism";
  m.kind = ModelKind::Map;
  m.dimension = n;
  m.params = {{"det", static_cast<double>(det)}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.params["A" + std::to_string(i) + std::to_string(j)] = Ad(i, j);
  m.domain = Domain::torus(n);
  if (n == 1) m.degree = static_cast<int>(A(0, 0));
  if (g) {
    m.rule = [Ad, g](const Vector& s) { return Vector(Ad * s + g.value(s)); };
    if (g.jacobian) m.jacobian = [Ad, g](const Vector& s) { return Matrix(Ad + g.jacobian(s)); };
  } else {
    m.rule = [Ad](const Vector& s) { return Vector(Ad * s); };
    m.jacobian = [Ad](const Vector&) { return Ad; };
  }
  return m;
}

SystemModel make_torus_automorphism(const IntMatrix& A) {
  const long det = integer_determinant(A);
  if (std::labs(det) != 1) {
    std::ostringstream msg;
    msg << "torus automorphism needs |det A| = 1 (got " << det
        << "); use make_torus_endomorphism for coverings";
    throw PreconditionError(msg.str());
  }
  SystemModel m = make_torus_endomorphism(A);
  m.id = "torus_automorphism";
  return m;
}

SystemModel make_cat_map() {
  IntMatrix A(2, 2);
  A << 2, 1, 1, 1;
  SystemModel m = make_torus_automorphism(A);
  m.id = "cat";
  return m;
}

SystemModel make_doubling_map() {
  SystemModel m = make_torus_endomorphism(IntMatrix::Constant(1, 1, 2));
  m.id = "doubling";
  return m;
}

CircleFunction CircleFunction::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }, "0", 0.0};
}

CircleFunction CircleFunction::sine(double amplitude) {
  std::ostringstream d;
  d << amplitude << "*sin(2*pi*theta)";
  return {[amplitude](double t) { return amplitude * std::sin(kTwoPi * t); },
          [amplitude](double t) { return amplitude * kTwoPi * std::cos(kTwoPi * t); }, d.str(),
          amplitude};
}

double max_abs_derivative(const CircleFunction& g, int samples) {
  double best = 0.0;
  for (int i = 0; i < samples; ++i)
    best = std::max(best, std::abs(g.derivative(static_cast<double>(i) / samples)));
  return best;
}

SystemModel make_circle_family(int m, const CircleFunction& g, double omega) {
  if (!g.value || !g.derivative) throw PreconditionError("circle function needs value and derivative");
  SystemModel model;
  model.id = "circle";
  model.kind = ModelKind::Map;
  model.dimension = 1;
  model.params = {{"m", static_cast<double>(m)}, {"omega", omega}, {"g_amplitude", g.amplitude}};
  model.domain = Domain::torus(1);
  model.degree = m;
  model.rule = [m, g, omega](const Vector& s) {
    return Vector::Constant(1, m * s[0] + g.value(s[0]) + omega);
  };
  model.jacobian = [m, g](const Vector& s) { return Matrix::Constant(1, 1, m + g.derivative(s[0])); };
  return model;
}

SystemModel make_solid_torus_map(const SolidTorusParams& p) {
  if (p.fiber_dim < 1) throw PreconditionError("fiber dimension must be at least 1");
  if (!(p.fiber_radius > 0.0)) throw PreconditionError("fiber radius must be positive");
  if (p.mu < 0.0) throw PreconditionError("mu must be non-negative");
  const int d = p.fiber_dim;

  SystemModel model;
  model.id = "solid_torus";
  model.kind = ModelKind::Map;
  model.dimension = d + 1;
  model.params = {{"m", static_cast<double>(p.m)}, {"omega", p.omega},
                  {"mu", p.mu}, {"fiber_radius", p.fiber_radius},
                  {"g_amplitude", p.g.amplitude}};
  std::vector<std::pair<double, double>> bounds(d, {-p.fiber_radius, p.fiber_radius});
  bounds.push_back({0.0, 1.0});
  model.domain = Domain::box(bounds);
  model.domain.axes[d].period = 1.0;

  const auto direction = [d](double theta) {
    Vector e = Vector::Zero(d);
    e[0] = std::cos(kTwoPi * theta);
    if (d > 1) e[1] = std::sin(kTwoPi * theta);
    return e;
  };

  if (p.builtin()) {
    if (!(p.contraction >= 0.0 && p.contraction < 1.0))
      throw PreconditionError("solid-torus contraction must lie in [0, 1)");
    model.params["contraction"] = p.contraction;
    model.params["offset"] = p.offset;
    model.params["h_amplitude"] = p.h_amplitude;
    model.rule = [p, d, direction](const Vector& s) {
      const double theta = s[d];
      Vector out(d + 1);
      out.head(d) = p.contraction * s.head(d) + p.offset * direction(theta);
      out[d] = p.m * theta + p.g.value(theta) + p.omega +
               p.mu * p.h_amplitude * std::sin(kTwoPi * theta);
      return out;
    };
    model.jacobian = [p, d](const Vector& s) {
      const double theta = s[d];
      Matrix j = Matrix::Zero(d + 1, d + 1);
      j.topLeftCorner(d, d) = p.contraction * Matrix::Identity(d, d);
      j(0, d) = -p.offset * kTwoPi * std::sin(kTwoPi * theta);
      if (d > 1) j(1, d) = p.offset * kTwoPi * std::cos(kTwoPi * theta);
      j(d, d) = p.m + p.g.derivative(theta) +
                p.mu * p.h_amplitude * kTwoPi * std::cos(kTwoPi * theta);
      return j;
    };
    return model;
  }

  const auto f = p.f ? p.f : [p, direction](const Vector& x, double theta) {
    return Vector(p.contraction * x + p.offset * direction(theta));
  };
  const auto h = p.h ? p.h : [p](const Vector&, double theta) {
    return p.mu * p.h_amplitude * std::sin(kTwoPi * theta);
  };
  model.rule = [p, d, f, h](const Vector& s) {
    const double theta = s[d];
    const Vector x = s.head(d);
    Vector out(d + 1);
    out.head(d) = f(x, theta);
    out[d] = p.m * theta + p.g.value(theta) + p.omega + h(x, theta);
    return out;
  };
  model.tags.push_back("custom-fiber-map");

  // Sampled contraction along x: central differences of f on a coarse grid.
  const int grid = 9;
  double worst = 0.0;
  for (int it = 0; it < grid; ++it) {
    const double theta = static_cast<double>(it) / grid;
    for (int ix = 0; ix < grid; ++ix) {
      Vector x = Vector::Zero(d);
      x[0] = p.fiber_radius * (-0.9 + 1.8 * ix / (grid - 1));
      Matrix fx(d, d);
      for (int c = 0; c < d; ++c) {
        Vector xp = x, xm = x;
        xp[c] += 1e-6;
        xm[c] -= 1e-6;
        fx.col(c) = (f(xp, theta) - f(xm, theta)) / 2e-6;
      }
      worst = std::max(worst, fx.jacobiSvd().singularValues()[0]);
    }
  }
  if (worst >= 1.0) {
    std::ostringstream msg;
    msg << "fiber map is not a contraction along x (sampled |df/dx| = " << worst << ")";
    throw PreconditionError(msg.str());
  }
  return model;
}

CorrectionHandle CorrectionHandle::constant(double c) {
  return {[c](double, double) { return c; }, [](double, double) { return 0.0; },
          [](double, double) { return 0.0; }};
}

SystemModel make_geometric_lorenz(const GeomLorenzParams& p) {
  if (p.A1 == 0.0 || p.A2 == 0.0) throw PreconditionError("separatrix values A1, A2 must be nonzero");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw PreconditionError("alpha must lie in (0, 1)");
  const CorrectionHandle phi1 = p.phi1.value_or(CorrectionHandle::constant(p.A1));
  const CorrectionHandle phi2 = p.phi2.value_or(CorrectionHandle::constant(-p.A1));
  const CorrectionHandle psi1 = p.psi1.value_or(CorrectionHandle::constant(-p.A2));
  const CorrectionHandle psi2 = p.psi2.value_or(CorrectionHandle::constant(p.A2));
  const double alpha = p.alpha;

  SystemModel m;
  m.id = "geometric_lorenz";
  m.kind = ModelKind::Map;
  m.dimension = 2;
  m.params = {{"x1s", p.x1s}, {"x2s", p.x2s}, {"y1s", p.y1s}, {"y2s", p.y2s},
              {"A1", p.A1},   {"A2", p.A2},   {"alpha", alpha}};
  m.domain = Domain::box({{-1.0, 1.0}, {-2.0, 2.0}});
  m.locus = Locus{1, 0.0};
  m.rule = [=](const Vector& s) {
    const double x = s[0], y = s[1];
    Vector out(2);
    if (y >= 0.0) {
      const double w = std::pow(y, alpha);
      out << p.x1s + phi1.value(x, y) * w, p.y1s + psi1.value(x, y) * w;
    } else {
      const double w = std::pow(-y, alpha);
      out << p.x2s + phi2.value(x, y) * w, p.y2s + psi2.value(x, y) * w;
    }
    return out;
  };
  m.one_sided_limit = [p](const Vector&, int side) {
    Vector out(2);
    if (side > 0)
      out << p.x1s, p.y1s;
    else
      out << p.x2s, p.y2s;
    return out;
  };
  if (phi1.differentiable() && phi2.differentiable() && psi1.differentiable() &&
      psi2.differentiable()) {
    m.jacobian = [=](const Vector& s) {
      const double x = s[0], y = s[1];
      const bool upper = y >= 0.0;
      const double u = upper ? y : -y;  // distance to S
      const double du = upper ? 1.0 : -1.0;
      const double w = std::pow(u, alpha);
      const double dw = alpha * std::pow(u, alpha - 1.0) * du;
      const CorrectionHandle& f = upper ? phi1 : phi2;
      const CorrectionHandle& g = upper ? psi1 : psi2;
      Matrix j(2, 2);
      j << f.dx(x, y) * w, f.dy(x, y) * w + f.value(x, y) * dw,
           g.dx(x, y) * w, g.dy(x, y) * w + g.value(x, y) * dw;
      return j;
    };
  }
  return m;
}

SystemModel make_piecewise_linear_lorenz(const PiecewiseLinearLorenzParams& p) {
  SystemModel m;
  m.id = "pl_lorenz";
  m.kind = ModelKind::Map;
  m.dimension = 2;
  m.params = {{"x1s", p.x1s}, {"x2s", p.x2s}, {"y1s", p.y1s}, {"y2s", p.y2s},
              {"fx", p.fx},   {"fy", p.fy},   {"gx", p.gx},   {"gy", p.gy}};
  m.domain = Domain::box({{-1.0, 1.0}, {-2.0, 2.0}});
  m.locus = Locus{1, 0.0};
  m.rule = [p](const Vector& s) {
    const bool upper = s[1] >= 0.0;
    Vector out(2);
    out << (upper ? p.x1s : p.x2s) + p.fx * s[0] + p.fy * s[1],
           (upper ? p.y1s : p.y2s) + p.gx * s[0] + p.gy * s[1];
    return out;
  };
  m.one_sided_limit = [p](const Vector& s, int side) {
    Vector out(2);
    out << (side > 0 ? p.x1s : p.x2s) + p.fx * s[0], (side > 0 ? p.y1s : p.y2s) + p.gx * s[0];
    return out;
  };
  m.jacobian = [p](const Vector&) {
    Matrix j(2, 2);
    j << p.fx, p.fy, p.gx, p.gy;
    return j;
  };
  return m;
}

SystemModel make_wild_map(const WildMapParams& p) {
  if (!(p.rho > 0.0 && p.rho < 0.5)) throw PreconditionError("rho must lie in (0, 1/2)");
  if (!(p.eta > p.rho)) throw PreconditionError("eta must exceed rho");
  SystemModel m;
  m.id = "wild";
  m.kind = ModelKind::Map;
  m.dimension = 3;
  m.params = {{"rho", p.rho}, {"eta", p.eta}, {"a", p.a}, {"b", p.b},
              {"c", p.c},     {"d", p.d},     {"Omega", p.Omega}};
  m.domain = Domain::box({{-1.0, 1.0}, {0.0, kTwoPi}, {-1.0, 1.0}});
  m.domain.axes[1].period = kTwoPi;
  m.locus = Locus{0, 0.0};
  m.rule = [p](const Vector& s) {
    const double ax = std::abs(s[0]);
    const double r = std::pow(ax, p.rho);
    const double th = p.Omega * std::log(ax) + s[1];
    Vector out(3);
    out << p.a * r * std::cos(th), p.b * r * std::sin(th),
           (p.c + p.d * s[2] * std::pow(ax, p.eta)) * sign(s[0]);
    return out;
  };
  m.one_sided_limit = [p](const Vector&, int side) {
    Vector out(3);
    out << 0.0, 0.0, side > 0 ? p.c : -p.c;
    return out;
  };
  m.jacobian = [p](const Vector& s) {
    const double x = s[0];
    const double ax = std::abs(x);
    const double r = std::pow(ax, p.rho);
    const double th = p.Omega * std::log(ax) + s[1];
    const double c = std::cos(th), sn = std::sin(th);
    const double rx = r / x;  // sign(x) |x|^(rho-1)
    const double xe = std::pow(ax, p.eta);
    Matrix j(3, 3);
    j << p.a * rx * (p.rho * c - p.Omega * sn), -p.a * r * sn, 0.0,
         p.b * rx * (p.rho * sn + p.Omega * c), p.b * r * c, 0.0,
         p.d * s[2] * p.eta * xe / ax, 0.0, p.d * xe * sign(x);
    return j;
  };
  return m;
}

}  // namespace chaoslab::zoo
