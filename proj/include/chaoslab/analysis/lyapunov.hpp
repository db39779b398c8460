#pragma once

#include "chaoslab/core/tangent.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace chaoslab {

struct LyapunovSettings {
  double duration = 1000.0;  // time units (flows) or iterations (maps)
  int exponents = 0;         // 0: full spectrum
  double transient = 0.0;    // discarded before the frame starts growing
  double renorm_interval = 1.0;
  StepSettings step;
  int history_points = 100;
  double drift_bound = 1e-2;
  std::optional<std::uint64_t> seed;  // start frame; default seed when unset
};

struct LyapunovResult {
  std::vector<double> exponents;  // descending
  std::vector<double> history_time;
  std::vector<std::vector<double>> history;  // descending at each checkpoint
  double final_drift = 0.0;
  bool converged = false;
  double elapsed = 0.0;  // may fall short of the duration when the orbit terminates
  Termination termination = Termination::Completed;
  std::string detail;
  LyapunovSettings settings;
  State initial;
  State final_state;

  double sum() const;
};

/// Benettin-style estimate: a k-frame is carried along the orbit of `s0` and
/// re-orthonormalized every `renorm_interval`; exponents are accumulated log
/// growths divided by the elapsed time.
///
/// The drift compares the spectrum at the end with the spectrum at 90% of the
/// run, relative to the largest |exponent|; `converged` is drift < bound.
LyapunovResult lyapunov_spectrum(const SystemModel& model, const State& s0,
                                 const LyapunovSettings& settings = {});

nlohmann::json to_json(const LyapunovResult& r);

}  // namespace chaoslab
