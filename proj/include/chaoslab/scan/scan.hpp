#pragma once

#include "chaoslab/zoo/models.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chaoslab::scan {

/// Closed tag set.
namespace tag {
inline constexpr const char* kBlueSkyOrbit = "blue-sky-orbit";
inline constexpr const char* kHypothesisViolation = "hypothesis-violation";
inline constexpr const char* kSolenoid = "solenoid";
inline constexpr const char* kNotASolenoid = "not-a-solenoid";
inline constexpr const char* kFixedPoint = "fixed-point";
inline constexpr const char* kRotation = "rotation";
inline constexpr const char* kLocked = "locked";
inline constexpr const char* kExpandingChaos = "expanding-chaos";
inline constexpr const char* kChaotic = "chaotic";
inline constexpr const char* kRegular = "regular";
inline constexpr const char* kDomainEscape = "domain-escape";
inline constexpr const char* kReductionInvalid = "reduction-invalid";
}  // namespace tag

const std::vector<std::string>& all_tags();

struct ScanPoint {
  std::map<std::string, double> params;  // swept values
  std::string tag;
  std::map<std::string, double> diagnostics;
  std::map<std::string, std::string> text;  // kneading strings, notes
};

struct ScanResult {
  std::string family;
  std::vector<std::string> swept;
  std::vector<int> shape;          // grid size per swept name, last varies fastest
  std::vector<ScanPoint> points;   // row-major
  nlohmann::json spec;             // provenance
  std::string code_version;
};

// ---------------------------------------------------------------------------
// Blue-sky family: circle return map theta -> g(theta) + omega (m = 0) glued
// to the saddle-node passage of z' = mu + z^2 from z = -1 to z = 1.
// ---------------------------------------------------------------------------

struct BlueSkySettings {
  int seeds = 16;
  int iterations = 2000;
  double dt = 1e-2;
};

/// Passage time of z' = mu + z^2 from -1 to 1, integrated numerically.
double saddle_node_passage_time(double mu, double dt = 1e-2);

/// Throws PreconditionError unless max |g'| < 1.
ScanResult blue_sky_scan(const zoo::CircleFunction& g, double omega, const std::vector<double>& mus,
                         const BlueSkySettings& settings = {}, int threads = 1);

// ---------------------------------------------------------------------------
// Solenoid birth: the swept value is the fiber contraction mu_c.
// ---------------------------------------------------------------------------

struct SolenoidSettings {
  int theta_samples = 4096;
  int section_depth = 14;  // capped so that |m|^depth <= 2^16
  double dimension_lo = 0.0, dimension_hi = 1.0;
};

struct FiberOverlap {
  bool disjoint = false;
  double slack = 0.0;        // min center distance minus radii sum
  double witness_theta = 0.0;
  bool closed_form = false;
};

/// Derivative margin min |m + c'(theta)| - 1 of the circle part.
double solenoid_derivative_margin(const zoo::SolidTorusParams& p, int samples = 4096);
/// Disjointness of the |m| images of a fiber disk over each target angle.
FiberOverlap fiber_image_overlap(const zoo::SolidTorusParams& p, int samples = 4096);
/// Points of the attractor in the fiber over theta0, from the preimage tree.
std::vector<Vector> fiber_section(const zoo::SolidTorusParams& p, double theta0 = 0.0, int depth = 14);

/// Needs |m| >= 2 and a fiber-preserving h.
ScanResult solenoid_birth_check(const zoo::SolidTorusParams& p, const std::vector<double>& contractions,
                                const SolenoidSettings& settings = {}, int threads = 1);

// ---------------------------------------------------------------------------
// Circle family theta -> m theta + g(theta) + omega
// ---------------------------------------------------------------------------

struct CircleScanSettings {
  int transient = 1000;
  int iterations = 100000;
  double zero_tolerance = 1e-4;  // |lambda| below this counts as zero
  std::uint64_t seed = 20240917ULL;
};

ScanResult circle_family_scan(int m, const zoo::CircleFunction& g, const std::vector<double>& omegas,
                              const CircleScanSettings& settings = {}, int threads = 1);

// ---------------------------------------------------------------------------
// Two-parameter geometric Lorenz family: y1s += mu1, y2s += mu2.
// ---------------------------------------------------------------------------

struct LorenzScanSettings {
  long iterations = 20000;
  long transient = 200;
  int kneading_length = 32;
  int entropy_depth = 1;
  bool kneading = true;
  bool verify = false;
  double chaos_threshold = 0.01;
  std::uint64_t seed = 20240917ULL;
};

/// Throws PreconditionError unless the base parameters pass (a)-(d).
ScanResult lorenz_family_scan(const zoo::GeomLorenzParams& base, const std::vector<double>& mu1,
                              const std::vector<double>& mu2, const LorenzScanSettings& settings = {},
                              int threads = 1);

// ---------------------------------------------------------------------------
// Specs and output
// ---------------------------------------------------------------------------

struct SweepAxis {
  std::string name;
  double min = 0.0, max = 0.0;
  int n = 0;
  bool log = false;

  std::vector<double> values() const;
};

struct ScanSpec {
  std::string family;  // blue_sky | solenoid | circle | lorenz
  nlohmann::json params = nlohmann::json::object();
  std::vector<SweepAxis> sweep;
  std::vector<std::string> analyses;
  std::uint64_t seed = 20240917ULL;
};

/// Validates names, ranges and grid sizes; throws ConfigError naming the field.
ScanSpec parse_scan_spec(const nlohmann::json& j);
nlohmann::json to_json(const ScanSpec& spec);
ScanResult run_scan(const ScanSpec& spec, int threads = 1);

/// One row per grid point: swept values, tag, then diagnostics and text
/// columns in name order.
void write_scan_csv(std::ostream& os, const ScanResult& r);

/// Diagnostic values laid out on the grid (NaN where absent); 1D scans give a single row.
std::vector<std::vector<double>> diagnostic_grid(const ScanResult& r, const std::string& key);

}  // namespace chaoslab::scan
