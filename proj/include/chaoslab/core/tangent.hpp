#pragma once

#include "chaoslab/core/integrate.hpp"

namespace chaoslab {

/// k orthonormal tangent vectors (columns of `basis`) and the log expansion
/// accumulated along each of them so far.
struct TangentFrame {
  Matrix basis;
  Vector log_growth;
  double elapsed = 0.0;  // time (flows) or iterations (maps)

  int size() const { return static_cast<int>(basis.cols()); }
  /// Largest |<u_i, u_j>| over i != j.
  double orthogonality_defect() const;
};

/// The first k coordinate unit vectors of R^n.
TangentFrame coordinate_frame(int n, int k);

/// Gram-Schmidt by Householder QR with a positive R diagonal; adds
/// log R_ii to the growth of column i.
void reorthonormalize(TangentFrame& frame);

struct TangentSettings {
  StepSettings step;
  double renorm_interval = 1.0;  // time units for flows, iterations for maps
};

struct TangentResult {
  Orbit orbit;
  TangentFrame frame;
};

/// Carries `frame0` along the orbit of `s0` for `span` time units (flows) or
/// iterations (maps) with the linearized dynamics, re-orthonormalizing every
/// `renorm_interval` and once more at the end.
TangentResult propagate_tangent(const SystemModel& model, const State& s0,
                                const TangentFrame& frame0, double span,
                                const TangentSettings& settings = {});

}  // namespace chaoslab
