#pragma once

#include "chaoslab/core/model.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace chaoslab {

enum class Stability { Attracting, Saddle, Repelling };

std::string to_string(Stability s);

struct PeriodicOrbitRecord {
  int period = 0;          // the n searched for; every point has T^n(p) = p
  int minimal_period = 0;
  State point;
  std::vector<std::complex<double>> multipliers;  // eigenvalues of D(T^n)(p)
  Stability stability = Stability::Saddle;
  bool neutral = false;          // some | |mu| - 1 | <= tolerance
  bool multipliers_flagged = false;  // D(T^n) singular or unavailable
  double residual = 0.0;         // |T^n(p) - p|
};

struct PeriodicSearchSettings {
  int seeds = 1000;
  std::uint64_t seed = 20240917ULL;
  int max_newton = 60;
  double tolerance = 1e-11;  // on |T^n(s) - s|
  double dedupe = 1e-8;
  double classify_tolerance = 1e-9;
  int threads = 1;
  /// Seeds are drawn from this box on unbounded axes; empty uses the domain.
  std::vector<std::pair<double, double>> box;
};

/// All points with T^n(p) = p found by the search, sorted lexicographically.
///
/// Circle maps with |degree| >= 2 and |T'| > 1 are solved exactly: the n-th
/// lift minus the identity is monotone, and each of its |d^n - 1| integer
/// level sets is bracketed and bisected. Everything else uses damped Newton
/// from random seeds, so the list may be incomplete.
std::vector<PeriodicOrbitRecord> find_periodic_points(const SystemModel& map, int n,
                                                      const PeriodicSearchSettings& settings = {});

/// Fills multipliers and stability for a point of period n.
void classify(const SystemModel& map, PeriodicOrbitRecord& record, double tolerance = 1e-9);

/// Iterates from `point + offset` (first axis) and reports whether the orbit
/// of `record` is reapproached within 1e-6 in at most `steps` iterations.
bool reverify_attracting(const SystemModel& map, const PeriodicOrbitRecord& record, double offset = 1e-4,
                         long steps = 1000);

nlohmann::json to_json(const PeriodicOrbitRecord& r);

}  // namespace chaoslab
