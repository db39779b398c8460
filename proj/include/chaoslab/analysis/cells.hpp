#pragma once

#include "chaoslab/core/graph.hpp"
#include "chaoslab/core/integrate.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace chaoslab {

struct CellGraphSettings {
  double h = 1.0;      // cell side
  double eps = 0.5;    // image inflation radius (sup norm)
  double tau = 0.5;    // flow time, or iterations (rounded up) for maps
  int samples_per_cell = 8;
  // Extra samples on a grid aligned with the singular vectors of the
  // finite-difference Jacobian of the time-tau map at the cell centre, spaced
  // so neighbouring images are at most eps apart. Capped per cell.
  bool adaptive = true;
  int max_adaptive_samples = 4096;
  long max_cells = 2'000'000;
  std::uint64_t seed = 20240917ULL;
  int threads = 1;
  StepSettings step;
};

/// Uniform grid of cubes over a box with sampled (eps, tau) transitions:
/// i -> j iff the time-tau image of some sample of cell i is within eps of
/// cell j. Samples are uniform random plus, when adaptive, a stretch-aware grid. Angular axes covering their full period wrap around.
struct CellGraph {
  Vector lo, hi;
  std::vector<int> shape;
  std::vector<char> wraps;
  CellGraphSettings settings;
  Adjacency edges;
  std::vector<char> lost_sample;  // some sample image left the box or hit the locus

  int dimension() const { return static_cast<int>(shape.size()); }
  long cell_count() const { return static_cast<long>(edges.size()); }
  long edge_count() const;
  /// Index of the cell containing s, or -1 outside the box.
  long cell_of(const State& s) const;
  Vector cell_lo(long cell) const;
  Vector cell_hi(long cell) const;
  Vector cell_center(long cell) const;
  bool on_boundary(long cell) const;  // touches a non-wrapping box face
};

/// Throws ResolutionTooFineError above settings.max_cells.
CellGraph build_cell_graph(const SystemModel& model, const Vector& lo, const Vector& hi,
                           const CellGraphSettings& settings = {});

struct ChainAttractor {
  std::vector<long> cells;  // sorted
  int components = 0;
  bool touches_boundary = false;
  long reachable = 0;  // size of the seed's forward closure
};

/// Union of the terminal strongly connected components of the seed's forward
/// closure. Components that are a single cell without a self-loop only count
/// when nothing else is terminal.
ChainAttractor chain_attractor(const CellGraph& graph, long seed_cell);

void write_edges_csv(std::ostream& os, const CellGraph& graph);
void write_cells_csv(std::ostream& os, const CellGraph& graph, const std::vector<long>& cells);

}  // namespace chaoslab
