#include "chaoslab/analysis/cells.hpp"

#include "chaoslab/core/errors.hpp"
#include "chaoslab/core/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace chaoslab {

long CellGraph::edge_count() const {
  long total = 0;
  for (const auto& e : edges) total += static_cast<long>(e.size());
  return total;
}

long CellGraph::cell_of(const State& s) const {
  long index = 0;
  for (int i = dimension() - 1; i >= 0; --i) {
    const double u = (s[i] - lo[i]) / settings.h;
    long c = static_cast<long>(std::floor(u));
    if (wraps[i]) {
      c = ((c % shape[i]) + shape[i]) % shape[i];
    } else if (c < 0 || c >= shape[i]) {
      // The top face belongs to the last cell.
      if (s[i] == hi[i]) c = shape[i] - 1;
      else return -1;
    }
    index = index * shape[i] + c;
  }
  return index;
}

namespace {

std::vector<long> unravel(const CellGraph& g, long cell) {
  std::vector<long> c(static_cast<std::size_t>(g.dimension()));
  for (int i = 0; i < g.dimension(); ++i) {
    c[i] = cell % g.shape[i];
    cell /= g.shape[i];
  }
  return c;
}

long ravel(const CellGraph& g, const std::vector<long>& c) {
  long index = 0;
  for (int i = g.dimension() - 1; i >= 0; --i) index = index * g.shape[i] + c[i];
  return index;
}

/// Grid points of the cell along the singular vectors of the secant Jacobian
/// across the cell, dense enough that neighbouring images are eps apart.
template <class Image>
std::vector<State> stretch_grid(const SystemModel& model, const CellGraph& g, const Vector& clo, const Vector& chi,
                                const Image& image) {
  const int n = g.dimension();
  const CellGraphSettings& st = g.settings;
  const Vector centre = 0.5 * (clo + chi);
  Matrix jac(n, n);
  State plus(n), minus(n);
  for (int i = 0; i < n; ++i) {
    const double half = 0.5 * (chi[i] - clo[i]);
    State a = centre, b = centre;
    a[i] += half;
    b[i] -= half;
    if (!image(a, plus) || !image(b, minus)) return {};
    Vector d = plus - minus;
    for (int j = 0; j < n; ++j) {
      const Axis& ax = model.domain.axes[j];
      if (ax.angular()) d[j] -= ax.period * std::round(d[j] / ax.period);
    }
    jac.col(i) = d / (2.0 * half);
  }
  if (!jac.allFinite()) return {};
  const Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullV);
  const double diameter = (chi - clo).norm();
  std::vector<long> counts(n);
  double total = 1.0;
  for (int j = 0; j < n; ++j) {
    counts[j] = std::max(1L, static_cast<long>(std::ceil(svd.singularValues()[j] * diameter / st.eps)));
    total *= static_cast<double>(counts[j]);
  }
  if (total <= 1.0) return {};
  if (total > st.max_adaptive_samples) {
    const double shrink = std::pow(st.max_adaptive_samples / total, 1.0 / n);
    for (auto& c : counts) c = std::max(1L, static_cast<long>(std::floor(static_cast<double>(c) * shrink)));
  }
  std::vector<State> points;
  std::vector<long> m(n, 0);
  while (true) {
    State p = centre;
    for (int j = 0; j < n; ++j)
      p += diameter * ((static_cast<double>(m[j]) + 0.5) / static_cast<double>(counts[j]) - 0.5) * svd.matrixV().col(j);
    p = p.cwiseMax(clo).cwiseMin(chi);
    points.push_back(p);
    int j = 0;
    while (j < n && m[j] == counts[j] - 1) m[j] = 0, ++j;
    if (j == n) break;
    ++m[j];
  }
  return points;
}

}  // namespace

Vector CellGraph::cell_lo(long cell) const {
  const auto c = unravel(*this, cell);
  Vector v(dimension());
  for (int i = 0; i < dimension(); ++i) v[i] = lo[i] + settings.h * static_cast<double>(c[i]);
  return v;
}

Vector CellGraph::cell_hi(long cell) const {
  Vector v = cell_lo(cell);
  for (int i = 0; i < dimension(); ++i) v[i] = std::min(v[i] + settings.h, hi[i]);
  return v;
}

Vector CellGraph::cell_center(long cell) const { return 0.5 * (cell_lo(cell) + cell_hi(cell)); }

bool CellGraph::on_boundary(long cell) const {
  const auto c = unravel(*this, cell);
  for (int i = 0; i < dimension(); ++i)
    if (!wraps[i] && (c[i] == 0 || c[i] == shape[i] - 1)) return true;
  return false;
}

CellGraph build_cell_graph(const SystemModel& model, const Vector& lo, const Vector& hi,
                           const CellGraphSettings& st) {
  const int n = model.dimension;
  if (lo.size() != n || hi.size() != n) throw PreconditionError("box dimension does not match the model");
  if (!lo.allFinite() || !hi.allFinite() || (hi.array() <= lo.array()).any())
    throw PreconditionError("cell box must be bounded with lo < hi");
  if (!(st.h > 0.0) || !(st.eps > 0.0) || !(st.tau > 0.0))
    throw PreconditionError("h, eps and tau must be positive");
  if (st.samples_per_cell < 1) throw PreconditionError("need at least one sample per cell");

  CellGraph g;
  g.lo = lo;
  g.hi = hi;
  g.settings = st;
  double total = 1.0;
  for (int i = 0; i < n; ++i) {
    const int cells = static_cast<int>(std::ceil((hi[i] - lo[i]) / st.h - 1e-9));
    g.shape.push_back(std::max(1, cells));
    total *= g.shape.back();
    const Axis& ax = model.domain.axes[i];
    g.wraps.push_back(ax.angular() && lo[i] == 0.0 && hi[i] == ax.period &&
                      std::abs(g.shape.back() * st.h - ax.period) < 1e-9 * ax.period);
  }
  if (total > static_cast<double>(st.max_cells))
    throw ResolutionTooFineError("cell grid would have " + std::to_string(static_cast<long long>(total)) +
                                 " cells; the cap is " + std::to_string(st.max_cells));
  const long count = static_cast<long>(total);
  g.edges.assign(static_cast<std::size_t>(count), {});
  g.lost_sample.assign(static_cast<std::size_t>(count), 0);

  StepSettings step = st.step;
  step.record_stride = 0;
  const long iterations = static_cast<long>(std::ceil(st.tau - 1e-12));

  parallel_for(static_cast<std::size_t>(count), st.threads, [&](std::size_t cell) {
    auto rng = make_rng(st.seed, cell);
    const Vector clo = g.cell_lo(static_cast<long>(cell)), chi = g.cell_hi(static_cast<long>(cell));
    std::vector<int>& out = g.edges[cell];
    const auto image = [&](const State& p, State& q) {
      if (model.near_locus(p)) return false;
      const Orbit orbit = model.is_flow() ? integrate_flow(model, p, st.tau, step) : iterate_map(model, p, iterations, 0);
      if (!orbit.completed()) return false;
      q = orbit.back();
      return true;
    };
    std::vector<State> samples;
    for (int k = 0; k < st.samples_per_cell; ++k) {
      State p(n);
      for (int i = 0; i < n; ++i) p[i] = uniform(rng, clo[i], chi[i]);
      samples.push_back(p);
    }
    if (st.adaptive) {
      const auto grid = stretch_grid(model, g, clo, chi, image);
      samples.insert(samples.end(), grid.begin(), grid.end());
    }
    State q(n);
    for (const State& p : samples) {
      if (!image(p, q)) {
        g.lost_sample[cell] = 1;
        continue;
      }
      // Cells meeting the sup-norm ball of radius eps around the image.
      std::vector<long> first(n), last(n);
      bool inside = true;
      for (int i = 0; i < n && inside; ++i) {
        first[i] = static_cast<long>(std::floor((q[i] - st.eps - lo[i]) / st.h));
        last[i] = static_cast<long>(std::floor((q[i] + st.eps - lo[i]) / st.h));
        if (!g.wraps[i]) {
          first[i] = std::max(first[i], 0L);
          last[i] = std::min(last[i], static_cast<long>(g.shape[i]) - 1);
          if (first[i] > last[i]) inside = false;
        } else if (last[i] - first[i] + 1 > g.shape[i]) {
          first[i] = 0;
          last[i] = g.shape[i] - 1;
        }
      }
      if (!inside || (q.array() < lo.array() - st.eps).any() || (q.array() > hi.array() + st.eps).any()) {
        g.lost_sample[cell] = 1;
        continue;
      }
      std::vector<long> c = first;
      while (true) {
        std::vector<long> wrapped = c;
        for (int i = 0; i < n; ++i)
          if (g.wraps[i]) wrapped[i] = ((c[i] % g.shape[i]) + g.shape[i]) % g.shape[i];
        out.push_back(static_cast<int>(ravel(g, wrapped)));
        int i = 0;
        while (i < n && c[i] == last[i]) c[i] = first[i], ++i;
        if (i == n) break;
        ++c[i];
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  });
  return g;
}

ChainAttractor chain_attractor(const CellGraph& graph, long seed_cell) {
  if (seed_cell < 0 || seed_cell >= graph.cell_count()) throw PreconditionError("seed cell is not in the graph");
  const auto reach = reachable_from(graph.edges, {static_cast<int>(seed_cell)});
  // Restrict to the forward closure before computing components.
  std::vector<int> local(graph.edges.size(), -1), global;
  for (std::size_t v = 0; v < reach.size(); ++v)
    if (reach[v]) local[v] = static_cast<int>(global.size()), global.push_back(static_cast<int>(v));
  Adjacency sub(global.size());
  for (std::size_t i = 0; i < global.size(); ++i)
    for (int w : graph.edges[global[i]]) sub[i].push_back(local[w]);
  int count = 0;
  const auto comp = strongly_connected_components(sub, count);

  std::vector<char> terminal(static_cast<std::size_t>(count), 1), recurrent(static_cast<std::size_t>(count), 0);
  std::vector<int> size(static_cast<std::size_t>(count), 0);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    ++size[comp[i]];
    for (int w : sub[i]) {
      if (comp[w] != comp[i]) terminal[comp[i]] = 0;
      else recurrent[comp[i]] = 1;  // includes self-loops
    }
  }
  bool any_recurrent = false;
  for (int c = 0; c < count; ++c) any_recurrent = any_recurrent || (terminal[c] && recurrent[c]);

  ChainAttractor out;
  out.reachable = static_cast<long>(global.size());
  std::vector<char> chosen(static_cast<std::size_t>(count), 0);
  for (int c = 0; c < count; ++c) {
    chosen[c] = terminal[c] && (recurrent[c] || !any_recurrent);
    if (chosen[c]) ++out.components;
    // Dead ends of the closure mean some orbit left the box.
    if (terminal[c] && !recurrent[c]) out.touches_boundary = true;
  }
  for (std::size_t i = 0; i < sub.size(); ++i)
    if (chosen[comp[i]]) out.cells.push_back(global[i]);
  std::sort(out.cells.begin(), out.cells.end());
  for (long c : out.cells)
    if (graph.on_boundary(c) || graph.lost_sample[c]) out.touches_boundary = true;
  return out;
}

void write_edges_csv(std::ostream& os, const CellGraph& graph) {
  os << "src,dst\n";
  for (std::size_t i = 0; i < graph.edges.size(); ++i)
    for (int j : graph.edges[i]) os << i << ',' << j << '\n';
}

void write_cells_csv(std::ostream& os, const CellGraph& graph, const std::vector<long>& cells) {
  os << "cell_index";
  for (int i = 0; i < graph.dimension(); ++i) os << ",x" << i << "_lo,x" << i << "_hi";
  os << '\n';
  for (long c : cells) {
    const Vector a = graph.cell_lo(c), b = graph.cell_hi(c);
    os << c;
    for (int i = 0; i < graph.dimension(); ++i) os << ',' << format_double(a[i]) << ',' << format_double(b[i]);
    os << '\n';
  }
}

}  // namespace chaoslab
