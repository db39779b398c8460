#include "chaoslab/analysis/lyapunov.hpp"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace chaoslab {

double LyapunovResult::sum() const { return std::accumulate(exponents.begin(), exponents.end(), 0.0); }

namespace {

std::vector<double> spectrum(const TangentFrame& f) {
  std::vector<double> out(static_cast<std::size_t>(f.size()));
  for (int i = 0; i < f.size(); ++i) out[i] = f.elapsed > 0.0 ? f.log_growth[i] / f.elapsed : 0.0;
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

LyapunovResult lyapunov_spectrum(const SystemModel& model, const State& s0, const LyapunovSettings& settings) {
  if (s0.size() != model.dimension)
    throw PreconditionError("initial state dimension does not match model '" + model.id + "'");
  if (!(settings.duration > 0.0)) throw PreconditionError("duration must be positive");
  if (settings.history_points < 10) throw PreconditionError("history needs at least 10 checkpoints");
  if (settings.transient < 0.0) throw PreconditionError("transient must be non-negative");
  const int k = settings.exponents == 0 ? model.dimension : settings.exponents;
  if (k < 1 || k > model.dimension) throw PreconditionError("exponent count must be in [1, dimension]");

  LyapunovResult out;
  out.settings = settings;
  out.initial = s0;

  TangentSettings ts;
  ts.step = settings.step;
  ts.step.record_stride = 0;
  ts.renorm_interval = settings.renorm_interval;

  State s = s0;
  if (settings.transient > 0.0) {
    Orbit warm = model.is_flow() ? integrate_flow(model, s, settings.transient, ts.step)
                                 : iterate_map(model, s, std::lround(settings.transient), 0);
    if (!warm.completed()) {
      out.termination = warm.termination;
      out.detail = "during transient: " + warm.detail;
      out.final_state = warm.back();
      return out;
    }
    s = warm.back();
  }

  // A generic start frame: coordinate vectors can sit in the kernel of a
  // degenerate Jacobian (skew products whose first component ignores x).
  TangentFrame frame = coordinate_frame(model.dimension, k);
  {
    auto rng = make_rng(settings.seed.value_or(kDefaultSeed), 0);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < model.dimension; ++i) frame.basis(i, j) = uniform(rng, -1.0, 1.0);
    reorthonormalize(frame);
    frame.log_growth.setZero();
  }
  const double chunk = settings.duration / settings.history_points;
  for (int c = 1; c <= settings.history_points; ++c) {
    // Chunk ends are computed from the start so maps land on whole iterations.
    double span = c * chunk - frame.elapsed;
    if (model.is_map()) span = std::round(c * chunk) - frame.elapsed;
    if (span <= 0.0) continue;
    TangentResult step = propagate_tangent(model, s, frame, span, ts);
    frame = step.frame;
    s = step.orbit.back();
    if (frame.elapsed > 0.0) {
      out.history_time.push_back(frame.elapsed);
      out.history.push_back(spectrum(frame));
    }
    if (!step.orbit.completed()) {
      out.termination = step.orbit.termination;
      out.detail = step.orbit.detail;
      break;
    }
  }
  out.elapsed = frame.elapsed;
  out.final_state = s;
  out.exponents = spectrum(frame);

  if (out.history.size() >= 2) {
    const double t90 = 0.9 * out.history_time.back();
    std::size_t j = 0;
    while (j + 1 < out.history_time.size() && out.history_time[j + 1] <= t90) ++j;
    double scale = 0.0;
    for (double e : out.exponents) scale = std::max(scale, std::abs(e));
    double drift = 0.0;
    for (std::size_t i = 0; i < out.exponents.size(); ++i)
      drift = std::max(drift, std::abs(out.exponents[i] - out.history[j][i]));
    out.final_drift = scale > 0.0 ? drift / scale : drift;
  } else {
    out.final_drift = std::numeric_limits<double>::infinity();
  }
  out.converged = out.termination == Termination::Completed && out.final_drift < settings.drift_bound;
  return out;
}

nlohmann::json to_json(const LyapunovResult& r) {
  nlohmann::json j;
  j["exponents"] = r.exponents;
  j["sum"] = r.sum();
  j["converged"] = r.converged;
  j["final_drift"] = r.final_drift;
  j["elapsed"] = r.elapsed;
  j["termination"] = to_string(r.termination);
  if (!r.detail.empty()) j["detail"] = r.detail;
  j["initial"] = std::vector<double>(r.initial.data(), r.initial.data() + r.initial.size());
  j["settings"] = {{"duration", r.settings.duration},
                   {"renorm_interval", r.settings.renorm_interval},
                   {"transient", r.settings.transient},
                   {"dt", r.settings.step.dt},
                   {"adaptive", r.settings.step.adaptive},
                   {"drift_bound", r.settings.drift_bound}};
  if (r.settings.seed) j["settings"]["seed"] = *r.settings.seed;
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t i = 0; i < r.history.size(); ++i) hist.push_back({{"t", r.history_time[i]}, {"exponents", r.history[i]}});
  j["history"] = hist;
  return j;
}

}  // namespace chaoslab
