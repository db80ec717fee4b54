#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ftsc/errors.hpp"

namespace ftsc {

using Vertex = std::uint32_t;
using VertexSet = std::vector<Vertex>;

/// Sorts and deduplicates in place; returns the argument for chaining.
inline VertexSet normalize(VertexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool set_contains(std::span<const Vertex> sorted, Vertex v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

struct Edge {
  Vertex a = 0;
  Vertex b = 0;

  static Edge make(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph over dense ids [0, n) in CSR form.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
    for (auto& e : edges) {
      if (e.a == e.b) throw InvalidGraph("self-loop at vertex " + std::to_string(e.a));
      if (e.a >= n || e.b >= n)
        throw InvalidGraph("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                           ") has an endpoint outside [0," + std::to_string(n) + ")");
      e = Edge::make(e.a, e.b);
    }
    std::sort(edges.begin(), edges.end());
    if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end())
      throw InvalidGraph("duplicate edge (" + std::to_string(dup->a) + "," +
                         std::to_string(dup->b) + ")");
    edges_ = std::move(edges);

    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.a + 1];
      ++offsets_[e.b + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.a]++] = e.b;
      adjacency_[fill[e.b]++] = e.a;
    }
    for (std::size_t v = 0; v < n_; ++v)
      std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
  }

  Graph(std::size_t n, std::initializer_list<std::pair<Vertex, Vertex>> edges)
      : Graph(n, to_edges(edges)) {}

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  bool has_edge(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_) return false;
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  friend bool operator==(const Graph& x, const Graph& y) {
    return x.n_ == y.n_ && x.edges_ == y.edges_;
  }

 private:
  static std::vector<Edge> to_edges(std::initializer_list<std::pair<Vertex, Vertex>> list) {
    std::vector<Edge> out;
    out.reserve(list.size());
    for (auto [u, v] : list) out.push_back(Edge{u, v});
    return out;
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adjacency_;
};

/// Designated terminals U, kept sorted.
class TerminalSet {
 public:
  TerminalSet() = default;
  TerminalSet(VertexSet terminals, std::size_t n) : terminals_(normalize(std::move(terminals))) {
    if (!terminals_.empty() && terminals_.back() >= n)
      throw InvalidGraph("terminal " + std::to_string(terminals_.back()) + " outside [0," +
                         std::to_string(n) + ")");
  }

  std::size_t size() const { return terminals_.size(); }
  bool empty() const { return terminals_.empty(); }
  bool contains(Vertex v) const { return set_contains(terminals_, v); }
  const VertexSet& vertices() const { return terminals_; }
  auto begin() const { return terminals_.begin(); }
  auto end() const { return terminals_.end(); }

  friend bool operator==(const TerminalSet&, const TerminalSet&) = default;

 private:
  VertexSet terminals_;
};

/// A query fault set F with its scheme bound f.
class FaultSet {
 public:
  FaultSet(VertexSet faults, std::size_t f_bound, std::size_t n)
      : faults_(normalize(std::move(faults))), f_bound_(f_bound) {
    if (faults_.size() > f_bound_)
      throw Error("fault set of size " + std::to_string(faults_.size()) + " exceeds f=" +
                  std::to_string(f_bound_));
    if (!faults_.empty() && faults_.back() >= n)
      throw InvalidGraph("fault vertex outside the graph");
  }

  const VertexSet& vertices() const { return faults_; }
  std::size_t f_bound() const { return f_bound_; }
  std::size_t size() const { return faults_.size(); }

 private:
  VertexSet faults_;
  std::size_t f_bound_;
};

/// Component ids for the vertices of g minus a removed set; removed vertices get -1.
struct Components {
  std::vector<std::int32_t> id;
  std::size_t count = 0;

  bool connected(Vertex u, Vertex v) const { return id[u] >= 0 && id[u] == id[v]; }

  std::vector<VertexSet> groups() const {
    std::vector<VertexSet> out(count);
    for (std::size_t v = 0; v < id.size(); ++v)
      if (id[v] >= 0) out[static_cast<std::size_t>(id[v])].push_back(static_cast<Vertex>(v));
    return out;
  }
};

/// Components of g restricted to vertices whose mask entry is false.
inline Components components_masked(const Graph& g, const std::vector<char>& removed) {
  const std::size_t n = g.num_vertices();
  Components c;
  c.id.assign(n, -1);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (removed[s] || c.id[s] >= 0) continue;
    const auto cid = static_cast<std::int32_t>(c.count++);
    c.id[s] = cid;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : g.neighbors(v)) {
        if (removed[w] || c.id[w] >= 0) continue;
        c.id[w] = cid;
        stack.push_back(w);
      }
    }
  }
  return c;
}

inline std::vector<char> vertex_mask(std::size_t n, std::span<const Vertex> set) {
  std::vector<char> mask(n, 0);
  for (Vertex v : set) {
    if (v >= n) throw InvalidGraph("vertex " + std::to_string(v) + " outside the graph");
    mask[v] = 1;
  }
  return mask;
}

inline Components components(const Graph& g, std::span<const Vertex> removed = {}) {
  return components_masked(g, vertex_mask(g.num_vertices(), removed));
}

/// True iff two vertices of w_set - k_set lie in different components of g - k_set.
inline bool separates(const Graph& g, std::span<const Vertex> k_set,
                      std::span<const Vertex> w_set) {
  auto mask = vertex_mask(g.num_vertices(), k_set);
  auto comps = components_masked(g, mask);
  std::int32_t seen = -1;
  for (Vertex w : w_set) {
    if (mask[w]) continue;
    if (seen < 0) {
      seen = comps.id[w];
    } else if (comps.id[w] != seen) {
      return true;
    }
  }
  return false;
}

/// Ground truth: F separates the terminals.
inline bool is_steiner_cut(const Graph& g, const TerminalSet& u, std::span<const Vertex> f_set) {
  return separates(g, f_set, u.vertices());
}

/// Result of replacing every edge e by a path through a fresh middle vertex v_e.
struct Subdivision {
  Graph graph;
  std::size_t original_vertices = 0;
  std::map<Edge, Vertex> middle;

  Vertex middle_of(Vertex u, Vertex v) const {
    auto it = middle.find(Edge::make(u, v));
    if (it == middle.end()) throw InvalidGraph("no such edge in the subdivided graph");
    return it->second;
  }

  /// Vertex faults in the subdivided graph equivalent to the mixed fault set.
  VertexSet lift_faults(std::span<const Vertex> failed_vertices,
                        std::span<const Edge> failed_edges) const {
    VertexSet out(failed_vertices.begin(), failed_vertices.end());
    for (const auto& e : failed_edges) out.push_back(middle_of(e.a, e.b));
    return normalize(std::move(out));
  }
};

inline Subdivision subdivide_edges(const Graph& g) {
  Subdivision s;
  s.original_vertices = g.num_vertices();
  std::vector<Edge> edges;
  edges.reserve(2 * g.num_edges());
  Vertex next = static_cast<Vertex>(g.num_vertices());
  for (const auto& e : g.edges()) {
    s.middle.emplace(e, next);
    edges.push_back(Edge{e.a, next});
    edges.push_back(Edge{e.b, next});
    ++next;
  }
  s.graph = Graph(next, std::move(edges));
  return s;
}

/// A graph together with its terminal set, as read from the text format.
struct Instance {
  Graph graph;
  TerminalSet terminals;
};

/// Reads `n m k`, then m lines `u v`, then k terminal ids. `#` starts a comment.
inline Instance parse_instance(std::istream& in) {
  std::vector<long long> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        long long value = std::stoll(tok, &used);
        if (used != tok.size() || value < 0) throw std::invalid_argument(tok);
        tokens.push_back(value);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected a non-negative integer, got '" +
                         tok + "'");
      }
    }
  }
  if (tokens.size() < 3) throw ParseError("missing header `n m k`");
  const auto n = static_cast<std::size_t>(tokens[0]);
  const auto m = static_cast<std::size_t>(tokens[1]);
  const auto k = static_cast<std::size_t>(tokens[2]);
  if (tokens.size() != 3 + 2 * m + k)
    throw ParseError("expected " + std::to_string(2 * m + k) + " values after the header, found " +
                     std::to_string(tokens.size() - 3));
  std::vector<Edge> edges(m);
  for (std::size_t i = 0; i < m; ++i)
    edges[i] = Edge{static_cast<Vertex>(tokens[3 + 2 * i]), static_cast<Vertex>(tokens[4 + 2 * i])};
  VertexSet terms(k);
  for (std::size_t i = 0; i < k; ++i) terms[i] = static_cast<Vertex>(tokens[3 + 2 * m + i]);
  Instance inst{Graph(n, std::move(edges)), TerminalSet(terms, n)};
  if (inst.terminals.size() != k) throw ParseError("duplicate terminal ids");
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

inline void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.graph.num_vertices() << ' ' << inst.graph.num_edges() << ' '
      << inst.terminals.size() << '\n';
  for (const auto& e : inst.graph.edges()) out << e.a << ' ' << e.b << '\n';
  bool first = true;
  for (Vertex t : inst.terminals) {
    out << (first ? "" : " ") << t;
    first = false;
  }
  out << '\n';
}

}  // namespace ftsc
