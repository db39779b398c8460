#include "chaoslab/core/tangent.hpp"

#include "chaoslab/core/errors.hpp"

#include <cmath>

namespace chaoslab {

double TangentFrame::orthogonality_defect() const {
  const Matrix gram = basis.transpose() * basis;
  double worst = 0.0;
  for (int i = 0; i < gram.rows(); ++i)
    for (int j = 0; j < gram.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(gram(i, j)));
  return worst;
}

TangentFrame coordinate_frame(int n, int k) {
  if (k < 1 || k > n) throw PreconditionError("frame size must be in [1, dimension]");
  TangentFrame f;
  f.basis = Matrix::Identity(n, k);
  f.log_growth = Vector::Zero(k);
  return f;
}

void reorthonormalize(TangentFrame& frame) {
  const int k = frame.size();
  Eigen::HouseholderQR<Matrix> qr(frame.basis);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Matrix q = qr.householderQ() * Matrix::Identity(frame.basis.rows(), k);
  for (int i = 0; i < k; ++i) {
    const double rii = r(i, i);
    if (rii < 0.0) q.col(i) = -q.col(i);
    frame.log_growth[i] += std::log(std::abs(rii));
  }
  frame.basis = q;
}

namespace {

void check_frame(const SystemModel& model, const TangentFrame& frame) {
  if (frame.basis.rows() != model.dimension)
    throw PreconditionError("tangent frame dimension does not match the model");
  if (frame.log_growth.size() != frame.size())
    throw PreconditionError("tangent frame growth vector has the wrong length");
  if (frame.orthogonality_defect() > 1e-8)
    throw PreconditionError("initial tangent frame is not orthonormal");
  for (int i = 0; i < frame.size(); ++i)
    if (std::abs(frame.basis.col(i).norm() - 1.0) > 1e-8)
      throw PreconditionError("initial tangent frame is not normalized");
}

TangentResult propagate_flow(const SystemModel& model, const State& s0,
                             const TangentFrame& frame0, double span,
                             const TangentSettings& settings) {
  const int n = model.dimension;
  const int k = frame0.size();
  const StepSettings& step = settings.step;
  const long steps = std::max(1L, static_cast<long>(std::llround(span / step.dt)));
  const double h = span / static_cast<double>(steps);
  const long renorm_every =
      std::max(1L, static_cast<long>(std::llround(settings.renorm_interval / h)));

  // Augmented state: [x; vec(V)] with V the n-by-k tangent block.
  const auto field = [&](const Vector& y) {
    Vector dy(n + n * k);
    const Vector x = y.head(n);
    dy.head(n) = model.rule(x);
    const Matrix jac = jacobian_at(model, x).matrix;
    Eigen::Map<const Matrix> v(y.data() + n, n, k);
    Eigen::Map<Matrix>(dy.data() + n, n, k) = jac * v;
    return dy;
  };

  TangentResult out;
  out.frame = frame0;
  Orbit& orbit = out.orbit;
  orbit.meta.model_id = model.id;
  orbit.meta.params = model.params;
  orbit.meta.initial = s0;
  orbit.meta.integrator = "rk4-variational";
  orbit.meta.step = h;
  orbit.meta.periods = model.domain.periods();

  Vector y(n + n * k);
  y.head(n) = s0;
  Eigen::Map<Matrix>(y.data() + n, n, k) = frame0.basis;
  orbit.push(0.0, s0);

  for (long i = 1; i <= steps; ++i) {
    y = rk4_step<double>(field, y, h);
    Vector x = y.head(n);
    model.domain.reduce(x);
    y.head(n) = x;
    if (!y.allFinite() || x.norm() > step.escape_radius) {
      orbit.termination = Termination::Diverged;
      orbit.detail = "state norm exceeded escape radius during tangent propagation";
      break;
    }
    const double t = i * h;
    if (i % renorm_every == 0 || i == steps) {
      out.frame.basis = Eigen::Map<Matrix>(y.data() + n, n, k);
      reorthonormalize(out.frame);
      out.frame.elapsed = frame0.elapsed + t;
      Eigen::Map<Matrix>(y.data() + n, n, k) = out.frame.basis;
    }
    if (i == steps || (step.record_stride > 0 && i % step.record_stride == 0)) orbit.push(t, x);
  }
  return out;
}

TangentResult propagate_map(const SystemModel& model, const State& s0,
                            const TangentFrame& frame0, double span,
                            const TangentSettings& settings) {
  const long steps = std::max(0L, static_cast<long>(std::llround(span)));
  const long renorm_every =
      std::max(1L, static_cast<long>(std::llround(settings.renorm_interval)));
  const int stride = settings.step.record_stride;

  TangentResult out;
  out.frame = frame0;
  Orbit& orbit = out.orbit;
  orbit.meta.model_id = model.id;
  orbit.meta.params = model.params;
  orbit.meta.initial = s0;
  orbit.meta.integrator = "map-variational";
  orbit.meta.step = 1.0;
  orbit.meta.periods = model.domain.periods();

  State s = s0;
  model.domain.reduce(s);
  orbit.push(0.0, s);
  Matrix v = frame0.basis;
  long done = 0;
  for (long i = 1; i <= steps; ++i) {
    if (model.near_locus(s)) {
      orbit.termination = Termination::LocusHit;
      orbit.detail = "iterate " + std::to_string(i - 1) + " landed in the locus guard band";
      break;
    }
    v = jacobian_at(model, s).matrix * v;
    State next = model.evaluate(s);
    if (!model.domain.contains(next)) {
      orbit.termination = Termination::DomainEscape;
      orbit.detail = "iterate " + std::to_string(i) + " left the domain";
      break;
    }
    s = next;
    done = i;
    if (i % renorm_every == 0) {
      out.frame.basis = v;
      reorthonormalize(out.frame);
      v = out.frame.basis;
      out.frame.elapsed = frame0.elapsed + static_cast<double>(i);
    }
    if (i == steps || (stride > 0 && i % stride == 0)) orbit.push(static_cast<double>(i), s);
  }
  // Fold in whatever growth accumulated since the last renormalization.
  if (done % renorm_every != 0) {
    out.frame.basis = v;
    reorthonormalize(out.frame);
  }
  out.frame.elapsed = frame0.elapsed + static_cast<double>(done);
  if (orbit.times.back() != static_cast<double>(done)) orbit.push(static_cast<double>(done), s);
  return out;
}

}  // namespace

TangentResult propagate_tangent(const SystemModel& model, const State& s0,
                                const TangentFrame& frame0, double span,
                                const TangentSettings& settings) {
  if (s0.size() != model.dimension)
    throw PreconditionError("initial state dimension does not match model '" + model.id + "'");
  if (!(settings.renorm_interval > 0.0))
    throw PreconditionError("renormalization interval must be positive");
  if (!(span >= 0.0)) throw PreconditionError("span must be non-negative");
  check_frame(model, frame0);
  if (model.is_flow()) {
    if (!(settings.step.dt > 0.0)) throw PreconditionError("step size must be positive");
    return propagate_flow(model, s0, frame0, span, settings);
  }
  return propagate_map(model, s0, frame0, span, settings);
}

}  // namespace chaoslab
