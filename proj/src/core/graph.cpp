#include "chaoslab/core/graph.hpp"

#include <algorithm>
#include <utility>

namespace chaoslab {

std::vector<int> strongly_connected_components(const Adjacency& adj, int& count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  int counter = 0;
  count = 0;
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.assign(1, {root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      bool descended = false;
      while (next < adj[v].size()) {
        const int w = adj[v][next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      const int finished = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[finished]);
    }
  }
  return comp;
}

std::vector<char> reachable_from(const Adjacency& adj, const std::vector<int>& sources) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<int> todo;
  for (int s : sources)
    if (!seen[s]) seen[s] = 1, todo.push_back(s);
  while (!todo.empty()) {
    const int v = todo.back();
    todo.pop_back();
    for (int w : adj[v])
      if (!seen[w]) seen[w] = 1, todo.push_back(w);
  }
  return seen;
}

}  // namespace chaoslab
