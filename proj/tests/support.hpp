#pragma once

#include <cstdint>
#include <vector>

#include "ftsc/experiment.hpp"
#include "ftsc/graph.hpp"

namespace ftsc::testing {

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v + 1 < n; ++v) edges.push_back(Edge{v, v + 1});
  return Graph(n, std::move(edges));
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v < n; ++v) edges.push_back(Edge::make(v, static_cast<Vertex>((v + 1) % n)));
  return Graph(n, std::move(edges));
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (Vertex v = 1; v <= leaves; ++v) edges.push_back(Edge{0, v});
  return Graph(leaves + 1, std::move(edges));
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b) edges.push_back(Edge{a, b});
  return Graph(n, std::move(edges));
}

inline TerminalSet terminals(std::size_t n, VertexSet u) { return TerminalSet(std::move(u), n); }

/// Random small instance: gnp with the given p, terminals drawn independently with probability 1/2 (at least two).
inline Instance random_instance(Rng& rng, std::size_t n, double p) {
  std::vector<Edge> edges;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      if (rng.uniform() < p) edges.push_back(Edge{a, b});
  VertexSet u;
  for (Vertex v = 0; v < n; ++v)
    if (rng.below(2)) u.push_back(v);
  while (u.size() < 2) {
    u.push_back(static_cast<Vertex>(rng.below(n)));
    u = normalize(std::move(u));
  }
  return Instance{Graph(n, std::move(edges)), TerminalSet(u, n)};
}

}  // namespace ftsc::testing
