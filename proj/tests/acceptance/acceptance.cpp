// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include "cli.hpp"

#include "chaoslab/analysis/cells.hpp"
#include "chaoslab/analysis/lyapunov.hpp"
#include "chaoslab/analysis/periodic.hpp"
#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/integrate.hpp"
#include "chaoslab/core/parallel.hpp"
#include "chaoslab/scan/scan.hpp"
#include "chaoslab/symbolic/kneading.hpp"
#include "chaoslab/verify/conditions.hpp"
#include "chaoslab/zoo/models.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <thread>
#include <sstream>

using namespace chaoslab;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kLorenzSumRel = 0.02;
constexpr double kLorenzSeconds = 30.0;
constexpr double kLambdaMin = 0.5;
constexpr double kLambdaSpread = 0.1;
constexpr double kStepAgreement = 0.05;
constexpr double kCatTol = 1e-3;
constexpr double kCatSeconds = 1.0;
constexpr double kEntropyTol = 1e-9;
constexpr double kBlueSkyRel = 0.05;
constexpr double kSolenoidSeconds = 60.0;
constexpr double kSectionDimLo = 0.1, kSectionDimHi = 0.9, kSectionR2 = 0.98;
constexpr double kWildLimit = 1e-3;
constexpr double kWildLambda = 0.1;
constexpr double kWildSeconds = 300.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

State vec(std::initializer_list<double> v) {
  State s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s[i++] = x;
  return s;
}

Verdict lorenz_divergence() {
  const auto t0 = std::chrono::steady_clock::now();
  LyapunovSettings st;
  st.duration = 1000;
  const auto r = lyapunov_spectrum(zoo::make_lorenz(), vec({1, 1, 20}), st);
  const double secs = seconds_since(t0);
  const double target = -41.0 / 3.0;
  const double rel = std::abs(r.sum() - target) / std::abs(target);
  return {rel < kLorenzSumRel && secs < kLorenzSeconds && r.termination == Termination::Completed,
          "sum " + num(r.sum()) + " vs " + num(target) + " (rel " + num(rel, 3) + "), " + num(secs, 3) + " s"};
}

Verdict lorenz_positive() {
  const auto lor = zoo::make_lorenz();
  auto lambda1 = [&](double dt, std::vector<double>& out) {
    for (int i = 0; i < 10; ++i) {
      auto rng = make_rng(kDefaultSeed, static_cast<std::uint64_t>(i));
      const State s0 = vec({uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, 10, 40)});
      LyapunovSettings st;
      st.duration = 1000;
      st.transient = 10;
      st.exponents = 1;
      st.step.dt = dt;
      out.push_back(lyapunov_spectrum(lor, s0, st).exponents.front());
    }
  };
  std::vector<double> a, b;
  lambda1(0.01, a);
  lambda1(0.005, b);
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  const double min_b = *std::min_element(b.begin(), b.end());
  return {*lo > kLambdaMin && min_b > kLambdaMin && *hi - *lo < kLambdaSpread &&
              std::abs(mean_a - mean_b) < kStepAgreement,
          "lambda1 in [" + num(*lo, 4) + ", " + num(*hi, 4) + "] (spread " + num(*hi - *lo, 3) + "), mean dt=0.01 " +
              num(mean_a, 4) + " vs dt=0.005 " + num(mean_b, 4)};
}

Verdict cat_spectrum() {
  const auto t0 = std::chrono::steady_clock::now();
  LyapunovSettings st;
  st.duration = 1e5;
  const auto r = lyapunov_spectrum(zoo::make_cat_map(), vec({0.1234, 0.5678}), st);
  const double secs = seconds_since(t0);
  const double l = std::log((3 + std::sqrt(5.0)) / 2);
  const double err = std::max(std::abs(r.exponents[0] - l), std::abs(r.exponents[1] + l));
  return {err < kCatTol && secs < kCatSeconds,
          "exponents " + num(r.exponents[0]) + ", " + num(r.exponents[1]) + " (err " + num(err, 3) + "), " +
              num(secs, 3) + " s"};
}

Verdict doubling_census() {
  const auto pts = find_periodic_points(zoo::make_doubling_map(), 4);
  const bool repelling =
      std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.stability == Stability::Repelling; });
  const auto t = symbolic::build_transition_matrix(symbolic::piecewise_linear_map(2, 1, 2, -1), 1);
  const double err = std::abs(t.entropy - std::log(2.0));
  return {pts.size() == 15 && repelling && err < kEntropyTol,
          std::to_string(pts.size()) + " points of period 4, all repelling: " + (repelling ? "yes" : "no") +
              ", entropy error " + num(err, 3)};
}

Verdict blue_sky() {
  std::vector<double> mus;
  for (int i = 0; i < 20; ++i) mus.push_back(std::pow(10.0, -6.0 + 4.0 * i / 19.0));
  const auto r = scan::blue_sky_scan(zoo::CircleFunction::zero(), 0.3, mus);
  bool monotone = true;
  for (std::size_t i = 1; i < mus.size(); ++i)
    monotone = monotone && r.points[i].diagnostics.at("period") < r.points[i - 1].diagnostics.at("period");
  double worst = 0.0, worst_ratio = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    if (mus[i] > 1e-4 * (1 + 1e-12)) continue;
    const double T = r.points[i].diagnostics.at("period");
    worst = std::max(worst, std::abs(T / (std::numbers::pi / std::sqrt(mus[i])) - 1));
  }
  for (double mu : {1e-4, 1e-5, 1e-6}) {
    const double ratio = scan::saddle_node_passage_time(mu / 4) / scan::saddle_node_passage_time(mu);
    worst_ratio = std::max(worst_ratio, std::abs(ratio / 2 - 1));
  }
  return {monotone && worst < kBlueSkyRel && worst_ratio < kBlueSkyRel,
          std::string("monotone: ") + (monotone ? "yes" : "no") + ", max |T sqrt(mu)/pi - 1| = " + num(worst, 3) +
              ", max |T(mu/4)/(2 T(mu)) - 1| = " + num(worst_ratio, 3)};
}

Verdict solenoid() {
  const auto t0 = std::chrono::steady_clock::now();
  zoo::SolidTorusParams p;
  const auto r = scan::solenoid_birth_check(p, {0.2});
  const double secs = seconds_since(t0);
  const auto& d = r.points[0].diagnostics;
  const double margin = d.at("derivative_margin"), dim = d.at("section_dimension");
  const double r2 = d.count("section_r_squared") ? d.at("section_r_squared") : 0.0;
  const bool disjoint = r.points[0].tag == scan::tag::kSolenoid;
  return {margin >= 1.0 && disjoint && dim > kSectionDimLo && dim < kSectionDimHi && r2 >= kSectionR2 &&
              secs < kSolenoidSeconds,
          "margin " + num(margin) + ", disjoint " + (disjoint ? "yes" : "no") + " (slack " +
              num(d.at("overlap_slack")) + "), section dimension " + num(dim, 4) + " (r^2 " + num(r2, 4) + "), " +
              num(secs, 3) + " s"};
}

Verdict lorenz_conditions() {
  const auto pl = verify::check_lorenz_conditions(zoo::make_piecewise_linear_lorenz());
  const double q = pl.all_hold() ? verify::compute_q(pl) : 0.0;
  zoo::GeomLorenzParams p;
  p.alpha = 0.5;
  p.A1 = 0.05;
  const double A1 = p.A1;
  p.phi1 = zoo::CorrectionHandle{[A1](double x, double y) { return A1 * (1.0 + x / y); },
                                 [A1](double, double y) { return A1 / y; },
                                 [A1](double x, double y) { return -A1 * x / (y * y); }};
  const auto bad = verify::check_lorenz_conditions(zoo::make_geometric_lorenz(p));
  const auto& a = bad.at("a");
  const bool witnessed = !a.holds && std::abs(a.witness_point[1]) < 0.01;
  return {pl.all_hold() && q > 1.0 && witnessed,
          std::string("benchmark (a)-(d) ") + (pl.all_hold() ? "hold" : "fail") + ", q = " + num(q) +
              "; violator (a) " + (a.holds ? "holds" : "fails") + " with ||f_x|| = " + num(a.witness_value, 4) +
              " at y = " + num(a.witness_point[1], 3)};
}

Verdict kneading_invariance() {
  using symbolic::HighPrecision;
  auto rng = make_rng(kDefaultSeed, 8);
  int matched = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double sl = uniform(rng, 1.2, 2.0), sr = uniform(rng, 1.2, 2.0);
    const double ol = uniform(rng, sl - 1.0, 1.0), orr = uniform(rng, -1.0, 1.0 - sr);
    const auto G = symbolic::piecewise_linear_map<HighPrecision>(sl, ol, sr, orr);
    const HighPrecision e(uniform(rng, 0.5, 3.0));
    const auto h = [e](const HighPrecision& y) {
      return y < 0 ? HighPrecision(-pow(HighPrecision(-y), e)) : HighPrecision(pow(y, e));
    };
    const auto h_inv = [e](const HighPrecision& y) {
      return y < 0 ? HighPrecision(-pow(HighPrecision(-y), 1 / e)) : HighPrecision(pow(y, 1 / e));
    };
    const auto H = symbolic::conjugate<HighPrecision>(G, h, h_inv);
    matched += symbolic::compare_kneading(symbolic::kneading_invariant(G, 64), symbolic::kneading_invariant(H, 64))
                       .equal
                   ? 1
                   : 0;
  }
  const auto c = symbolic::compare_kneading(
      symbolic::kneading_invariant(symbolic::piecewise_linear_map<HighPrecision>(2, 1, 2, -1), 64),
      symbolic::kneading_invariant(symbolic::piecewise_linear_map<HighPrecision>(1.9, 1, 1.9, -1), 64));
  const int index = c.plus_index < 0 ? c.minus_index : c.plus_index;
  return {matched == 20 && !c.equal && index >= 0 && index < 64,
          std::to_string(matched) + "/20 conjugate pairs equal to N=64; slopes 2 vs 1.9 first differ at index " +
              std::to_string(index)};
}

Verdict wild_map() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto wild = zoo::make_wild_map();
  const auto report = verify::check_pseudohyperbolic(wild);
  const bool checks = report.at("ct0").holds && report.at("ct2").holds && report.at("ct3").holds &&
                      report.at("ct5").holds && report.at("ct4").holds;
  const double ct1_final = report.derived.count("ct1_final_AD") ? report.derived.at("ct1_final_AD") : NAN;
  const bool ct1 = report.at("ct1").holds && ct1_final < kWildLimit;

  std::vector<double> lambdas(100, NAN);
  std::vector<char> completed(100, 0);
  parallel_for(100, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())), [&](std::size_t i) {
    auto rng = make_rng(9, i);
    State s0(3);
    do {
      s0 << uniform(rng, -1, 1), uniform(rng, 0, 2 * std::numbers::pi), uniform(rng, -1, 1);
    } while (wild.near_locus(s0) || std::abs(s0[0]) < 1e-3);
    LyapunovSettings st;
    st.duration = 1e6;
    st.exponents = 1;
    st.renorm_interval = 10;
    st.seed = i;
    const auto r = lyapunov_spectrum(wild, s0, st);
    lambdas[i] = r.exponents.front();
    completed[i] = r.termination == Termination::Completed;
  });
  const double lambda_min = *std::min_element(lambdas.begin(), lambdas.end());
  const int done = static_cast<int>(std::count(completed.begin(), completed.end(), 1));

  int attracting = 0;
  for (int n = 1; n <= 8; ++n) {
    PeriodicSearchSettings ps;
    ps.seeds = 1000;
    for (const auto& rec : find_periodic_points(wild, n, ps))
      attracting += rec.stability == Stability::Attracting ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  return {checks && ct1 && lambda_min > kWildLambda && attracting == 0 && secs < kWildSeconds,
          std::string("ct0,ct2-ct5 ") + (checks ? "hold" : "fail") + "; ct1 final sup|A||D| = " + num(ct1_final, 4) +
              " (needs < 1e-3) " + (ct1 ? "holds" : "FAILS") + "; min lambda1 over 100 seeds " + num(lambda_min, 4) +
              " (" + std::to_string(done) + " complete); attracting orbits n<=8: " + std::to_string(attracting) +
              "; " + num(secs, 4) + " s"};
}

Verdict chain_attractor_sanity() {
  const auto lor = zoo::make_lorenz();
  CellGraphSettings st;
  st.h = 1;
  st.tau = 0.5;
  st.samples_per_cell = 8;
  st.step.dt = 0.02;
  st.eps = 1.0;
  const Vector lo = vec({-25, -30, 0}), hi = vec({25, 30, 50});
  const State seed = vec({0.1, 0.1, 0.5});
  const auto g1 = build_cell_graph(lor, lo, hi, st);
  const auto a1 = chain_attractor(g1, g1.cell_of(seed));
  st.eps = 0.5;
  const auto g2 = build_cell_graph(lor, lo, hi, st);
  const auto a2 = chain_attractor(g2, g2.cell_of(seed));
  const bool nested = std::includes(a1.cells.begin(), a1.cells.end(), a2.cells.begin(), a2.cells.end());

  long misses = 0, visited = 0;
  StepSettings step;
  step.dt = 0.01;
  step.record_stride = 10;
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto rng = make_rng(7, i);
    const State s0 = vec({uniform(rng, -20, 20), uniform(rng, -20, 20), uniform(rng, 5, 45)});
    const Orbit o = integrate_flow(lor, s0, 200, step);
    for (std::size_t k = 0; k < o.size(); ++k) {
      if (o.times[k] < 50) continue;
      const long c = g2.cell_of(o.states[k]);
      ++visited;
      if (c < 0 || !std::binary_search(a2.cells.begin(), a2.cells.end(), c)) ++misses;
    }
  }
  return {nested && misses == 0,
          "cells eps=1: " + std::to_string(a1.cells.size()) + ", eps=0.5: " + std::to_string(a2.cells.size()) +
              ", nested: " + (nested ? "yes" : "no") + "; omega-limit samples outside: " + std::to_string(misses) +
              " of " + std::to_string(visited)};
}

Verdict reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "chaoslab_acceptance_replay";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "blue_sky.json")
      << R"({"family": "blue_sky", "params": {"omega": 0.3}, "sweep": [{"name": "mu", "min": 1e-5, "max": 1e-2, "n": 4, "scale": "log"}]})";
  std::ofstream(dir / "lorenz.json")
      << R"({"family": "lorenz", "params": {"iterations": 2000}, "sweep": [{"name": "mu1", "min": -0.1, "max": 0.1, "n": 2}, {"name": "mu2", "min": -0.1, "max": 0.1, "n": 2}]})";
  std::ofstream(dir / "circle.json")
      << R"({"family": "circle", "params": {"m": 1, "g_amplitude": 0.1, "iterations": 5000}, "sweep": [{"name": "omega", "min": 0, "max": 0.5, "n": 4}]})";
  std::ofstream(dir / "solenoid.json")
      << R"({"family": "solenoid", "sweep": [{"name": "contraction", "min": 0.1, "max": 0.4, "n": 3}]})";
  const std::vector<std::vector<std::string>> runs{
      {"simulate", "--model", "lorenz", "--t", "50"},
      {"simulate", "--model", "wild", "--n", "2000", "--seed", "11"},
      {"verify", "--model", "cat"},
      {"verify", "--model", "pl_lorenz"},
      {"verify", "--matrix", "[[1,0],[0,1]]"},
      {"analyze", "lyapunov", "--model", "lorenz", "--t", "200"},
      {"analyze", "dimension", "--model", "lorenz", "--t", "200"},
      {"analyze", "recurrence", "--model", "lorenz", "--t", "300"},
      {"analyze", "periodic", "--model", "doubling", "--period", "4"},
      {"analyze", "attractor", "--model", "lorenz", "--h", "2", "--eps", "1", "--threads", "2"},
      {"scan", (dir / "blue_sky.json").string()},
      {"scan", (dir / "lorenz.json").string(), "--threads", "2"},
      {"scan", (dir / "circle.json").string()},
      {"scan", (dir / "solenoid.json").string()},
      {"kneading", "--compare", "1.9,1,1.9,-1"},
      {"kneading", "--model", "pl_lorenz"},
  };
  int ok = 0;
  std::string failures;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::string> args = runs[i];
    const fs::path out = dir / ("run" + std::to_string(i));
    args.insert(args.end(), {"--out", out.string()});
    std::ostringstream sink, err;
    const int first = cli::run(args, sink, err);
    const int again = first <= 1 ? cli::run({"replay", (out / "manifest.json").string()}, sink, err) : -1;
    if (first <= 1 && again == 0) {
      ++ok;
    } else {
      failures += " [" + runs[i][0] + (runs[i].size() > 1 ? " " + runs[i][1] : "") + "]";
    }
  }
  return {ok == static_cast<int>(runs.size()),
          std::to_string(ok) + "/" + std::to_string(runs.size()) + " commands replayed with identical hashes" +
              failures};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"Lorenz divergence identity", lorenz_divergence},
      {"positive chaos indicator", lorenz_positive},
      {"cat-map spectrum", cat_spectrum},
      {"doubling-map census", doubling_census},
      {"blue-sky scaling", blue_sky},
      {"solenoid verification", solenoid},
      {"Lorenz-map condition suite", lorenz_conditions},
      {"kneading conjugacy invariance", kneading_invariance},
      {"wild-map evidence suite", wild_map},
      {"chain attractor sanity", chain_attractor_sanity},
      {"reproducibility", reproducibility},
  };
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << v.detail
              << "  [" << num(seconds_since(t0), 3) << " s]" << std::endl;
  }
  std::cout << (ran - failed) << " of " << ran << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
