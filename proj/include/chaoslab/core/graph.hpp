#pragma once

#include <vector>

namespace chaoslab {

using Adjacency = std::vector<std::vector<int>>;

/// Tarjan's algorithm with an explicit stack. Returns the component id of
/// every vertex; ids are in reverse topological order (sinks first).
std::vector<int> strongly_connected_components(const Adjacency& adj, int& count);

/// Vertices reachable from `sources` (sources included).
std::vector<char> reachable_from(const Adjacency& adj, const std::vector<int>& sources);

}  // namespace chaoslab
