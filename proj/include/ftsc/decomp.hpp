#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ftsc/graph.hpp"
#include "ftsc/union_find.hpp"

namespace ftsc {

/// A forest T in which every two terminals connected in the host graph are connected.
struct SteinerForest {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<std::uint32_t> degree;

  static SteinerForest from_edges(std::size_t n, std::vector<Edge> edges) {
    SteinerForest t;
    t.n = n;
    for (auto& e : edges) e = Edge::make(e.a, e.b);
    std::sort(edges.begin(), edges.end());
    t.degree.assign(n, 0);
    for (const auto& e : edges) {
      ++t.degree[e.a];
      ++t.degree[e.b];
    }
    t.edges = std::move(edges);
    return t;
  }

  Graph as_graph() const { return Graph(n, edges); }

  std::vector<VertexSet> adjacency() const {
    std::vector<VertexSet> adj(n);
    for (const auto& e : edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  std::uint32_t max_degree() const {
    return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
  }

  friend bool operator==(const SteinerForest&, const SteinerForest&) = default;
};

/// The pair (T, B): a Steiner forest and its set of high-degree vertices.
struct Decomposition {
  SteinerForest forest;
  VertexSet bad;
  std::size_t threshold = 3;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

struct DecompositionOptions {
  /// Cap on improving swaps; 0 selects 50 * n.
  std::size_t max_swaps = 0;
};

struct DecompositionReport {
  bool p1_holds = false;
  bool p2_holds = false;
  bool p3_holds = false;
  /// Terminal pair connected in the host (or host - B) but not in T (or T - B).
  std::optional<std::pair<Vertex, Vertex>> p1_witness;
  /// Vertex of T - B whose degree exceeds r.
  std::optional<Vertex> p2_witness;
  std::string detail;

  bool all() const { return p1_holds && p2_holds && p3_holds; }
};

namespace detail {

/// Mutable forest used while searching; vertices outside the forest have no edges
/// and are not terminals.
class WorkingTree {
 public:
  WorkingTree(std::size_t n, const TerminalSet& u) : adj_(n), terminal_(n, 0) {
    for (Vertex t : u) terminal_[t] = 1;
  }

  std::size_t size() const { return adj_.size(); }
  bool terminal(Vertex v) const { return terminal_[v] != 0; }
  bool contains(Vertex v) const { return terminal_[v] || !adj_[v].empty(); }
  std::size_t degree(Vertex v) const { return adj_[v].size(); }
  const VertexSet& neighbors(Vertex v) const { return adj_[v]; }

  void add_edge(Vertex a, Vertex b) {
    adj_[a].insert(std::upper_bound(adj_[a].begin(), adj_[a].end(), b), b);
    adj_[b].insert(std::upper_bound(adj_[b].begin(), adj_[b].end(), a), a);
  }

  void remove_edge(Vertex a, Vertex b) {
    adj_[a].erase(std::find(adj_[a].begin(), adj_[a].end(), b));
    adj_[b].erase(std::find(adj_[b].begin(), adj_[b].end(), a));
  }

  void add_path(std::span<const Vertex> path) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) add_edge(path[i], path[i + 1]);
  }

  /// Removes non-terminal leaves until every leaf is a terminal.
  void prune() {
    std::vector<Vertex> stack;
    for (Vertex v = 0; v < size(); ++v)
      if (!terminal(v) && adj_[v].size() == 1) stack.push_back(v);
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      if (terminal(v) || adj_[v].size() != 1) continue;
      Vertex w = adj_[v].front();
      remove_edge(v, w);
      if (!terminal(w) && adj_[w].size() == 1) stack.push_back(w);
    }
  }

  /// Vertices of the forest path from x to y, or empty when they lie in different trees.
  VertexSet path(Vertex x, Vertex y) const {
    std::vector<std::int64_t> parent(size(), -1);
    std::deque<Vertex> queue{x};
    parent[x] = x;
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      if (v == y) break;
      for (Vertex w : adj_[v]) {
        if (parent[w] >= 0) continue;
        parent[w] = v;
        queue.push_back(w);
      }
    }
    if (parent[y] < 0) return {};
    VertexSet out{y};
    while (out.back() != x) out.push_back(static_cast<Vertex>(parent[out.back()]));
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::vector<std::size_t> degree_histogram() const {
    std::vector<std::size_t> hist(size() + 1, 0);
    for (const auto& a : adj_) ++hist[a.size()];
    return hist;
  }

  SteinerForest to_forest() const {
    std::vector<Edge> edges;
    for (Vertex v = 0; v < size(); ++v)
      for (Vertex w : adj_[v])
        if (v < w) edges.push_back(Edge{v, w});
    return SteinerForest::from_edges(size(), std::move(edges));
  }

 private:
  std::vector<VertexSet> adj_;
  std::vector<char> terminal_;
};

/// Multiset order on degrees: compare the count of each degree from the top down.
inline bool degrees_decreased(const std::vector<std::size_t>& before,
                              const std::vector<std::size_t>& after) {
  for (std::size_t d = before.size(); d-- > 0;)
    if (before[d] != after[d]) return after[d] < before[d];
  return false;
}

/// One round of the swap search: either performs one improving exchange, or
/// certifies the current forest with a high-degree set.
class SwapSearch {
 public:
  SwapSearch(const Graph& g, WorkingTree& tree, std::size_t r)
      : g_(g), tree_(tree), r_(r), pinned_(g.num_vertices(), 0) {}

  enum class Outcome { Improved, Certified, Stuck };

  Outcome run() {
    for (;;) {
      reset();
      for (;;) {
        auto found = connecting_path();
        if (!found) return Outcome::Certified;
        const VertexSet& p = *found;
        const Vertex x = p.front();
        const Vertex y = p.back();
        auto cycle = tree_.path(x, y);
        if (cycle.empty()) return Outcome::Stuck;  // forest is not Steiner; cannot happen

        std::optional<Vertex> heavy;
        VertexSet blocking;
        for (std::size_t i = 1; i + 1 < cycle.size(); ++i) {
          Vertex v = cycle[i];
          if (!bad_[v]) continue;
          if (tree_.degree(v) > r_) {
            if (!heavy || tree_.degree(v) > tree_.degree(*heavy)) heavy = v;
          } else {
            blocking.push_back(v);
          }
        }

        if (heavy) {
          const std::size_t dw = tree_.degree(*heavy);
          if (dw >= std::max(tree_.degree(x), tree_.degree(y)) + 2) {
            exchange(tree_, cycle, *heavy, p);
            tree_.prune();
            return Outcome::Improved;
          }
          if (try_cascade(cycle, *heavy, p)) return Outcome::Improved;
          bool pinned_any = false;
          for (Vertex e : {x, y}) {
            if (tree_.degree(e) >= r_ && !pinned_[e]) {
              pinned_[e] = 1;
              pinned_any = true;
            }
          }
          if (!pinned_any) return Outcome::Stuck;
          break;  // restart with the new pins
        }

        VertexSet freed;
        for (Vertex v : blocking)
          if (!pinned_[v]) freed.push_back(v);
        if (freed.empty()) return Outcome::Stuck;
        for (Vertex v : freed) unblock(v, p);
      }
    }
  }

  VertexSet bad_set() const {
    VertexSet out;
    for (Vertex v = 0; v < bad_.size(); ++v)
      if (bad_[v]) out.push_back(v);
    return out;
  }

 private:
  void reset() {
    const std::size_t n = g_.num_vertices();
    bad_.assign(n, 0);
    for (Vertex v = 0; v < n; ++v)
      if (tree_.degree(v) >= r_) bad_[v] = 1;
    unblock_path_.assign(n, {});
    uf_ = UnionFind(n);
    for (Vertex v = 0; v < n; ++v)
      for (Vertex w : tree_.neighbors(v))
        if (v < w && !bad_[v] && !bad_[w]) uf_.unite(v, w);
  }

  void unblock(Vertex v, const VertexSet& path) {
    bad_[v] = 0;
    unblock_path_[v] = path;
    for (Vertex w : tree_.neighbors(v))
      if (!bad_[w]) uf_.unite(v, w);
  }

  /// Shortest path in G - bad whose interior avoids the forest and whose two
  /// endpoints lie in different classes of the current forest pieces.
  std::optional<VertexSet> connecting_path() {
    const std::size_t n = g_.num_vertices();
    std::vector<std::int64_t> label(n, -1);
    std::vector<Vertex> parent(n);
    std::deque<Vertex> queue;
    for (Vertex v = 0; v < n; ++v) {
      if (!tree_.contains(v) || bad_[v]) continue;
      label[v] = static_cast<std::int64_t>(uf_.find(v));
      parent[v] = v;
      queue.push_back(v);
    }
    auto chain = [&](Vertex v) {
      VertexSet out{v};
      while (parent[out.back()] != out.back()) out.push_back(parent[out.back()]);
      return out;  // v ... source
    };
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      for (Vertex w : g_.neighbors(v)) {
        if (bad_[w]) continue;
        if (tree_.contains(w)) {
          if (static_cast<std::int64_t>(uf_.find(w)) == label[v]) continue;
          auto path = chain(v);
          std::reverse(path.begin(), path.end());
          path.push_back(w);
          return path;
        }
        if (label[w] < 0) {
          label[w] = label[v];
          parent[w] = v;
          queue.push_back(w);
        } else if (label[w] != label[v]) {
          auto path = chain(v);
          std::reverse(path.begin(), path.end());
          auto tail = chain(w);
          path.insert(path.end(), tail.begin(), tail.end());
          return path;
        }
      }
    }
    return std::nullopt;
  }

  /// Drops the cycle edge at `hub` and adds `path`. `cycle` is the forest path
  /// between the endpoints of `path`.
  static void exchange(WorkingTree& tree, const VertexSet& cycle, Vertex hub, const VertexSet& path) {
    auto at = std::find(cycle.begin(), cycle.end(), hub);
    Vertex before = *(at - 1);
    Vertex after = *(at + 1);
    tree.remove_edge(hub, std::min(before, after));
    tree.add_path(path);
  }

  /// Improvement whose endpoint is a previously unblocked vertex: after the main
  /// exchange, each such vertex sheds the extra edge using the path that unblocked it.
  bool try_cascade(const VertexSet& cycle, Vertex hub, const VertexSet& path) {
    WorkingTree trial = tree_;
    const auto before = tree_.degree_histogram();
    for (std::size_t i = 1; i + 1 < path.size(); ++i)
      if (trial.contains(path[i])) return false;
    exchange(trial, cycle, hub, path);

    std::vector<char> used(g_.num_vertices(), 0);
    std::vector<Vertex> work{path.front(), path.back()};
    while (!work.empty()) {
      Vertex v = work.back();
      work.pop_back();
      if (unblock_path_[v].empty() || trial.degree(v) <= r_) continue;
      if (used[v]) return false;
      used[v] = 1;
      const VertexSet& fix = unblock_path_[v];
      for (std::size_t i = 1; i + 1 < fix.size(); ++i)
        if (trial.contains(fix[i])) return false;
      auto loop = trial.path(fix.front(), fix.back());
      auto at = std::find(loop.begin(), loop.end(), v);
      if (loop.empty() || at == loop.end() || at == loop.begin() || at + 1 == loop.end()) return false;
      exchange(trial, loop, v, fix);
      work.push_back(fix.front());
      work.push_back(fix.back());
    }
    trial.prune();
    if (!degrees_decreased(before, trial.degree_histogram())) return false;
    tree_ = std::move(trial);
    return true;
  }

  const Graph& g_;
  WorkingTree& tree_;
  std::size_t r_;
  std::vector<char> bad_;
  std::vector<char> pinned_;
  std::vector<VertexSet> unblock_path_;
  UnionFind uf_{0};
};

}  // namespace detail

/// Edge-minimal Steiner forest: grows one tree per terminal-bearing component by
/// repeatedly attaching the nearest uncovered terminal along a shortest path,
/// then prunes non-terminal leaves.
inline SteinerForest minimal_steiner_forest(const Graph& g, const TerminalSet& u) {
  const std::size_t n = g.num_vertices();
  detail::WorkingTree tree(n, u);
  std::vector<char> covered(n, 0);
  std::vector<std::int64_t> parent(n);
  for (Vertex root : u) {
    if (covered[root]) continue;
    covered[root] = 1;
    VertexSet members{root};
    for (;;) {
      std::fill(parent.begin(), parent.end(), -1);
      std::deque<Vertex> queue;
      for (Vertex v : members) {
        parent[v] = v;
        queue.push_back(v);
      }
      std::optional<Vertex> target;
      while (!queue.empty() && !target) {
        Vertex v = queue.front();
        queue.pop_front();
        if (u.contains(v) && !covered[v]) {
          target = v;
          break;
        }
        for (Vertex w : g.neighbors(v)) {
          if (parent[w] >= 0) continue;
          parent[w] = v;
          queue.push_back(w);
        }
      }
      if (!target) break;
      Vertex v = *target;
      while (!covered[v]) {
        covered[v] = 1;
        members.push_back(v);
        auto p = static_cast<Vertex>(parent[v]);
        tree.add_edge(v, p);
        v = p;
      }
      std::sort(members.begin(), members.end());
    }
  }
  tree.prune();
  return tree.to_forest();
}

/// Machine check of the three decomposition properties.
inline DecompositionReport verify_decomposition(const Graph& g, const TerminalSet& u, std::size_t r,
                                                const Decomposition& d) {
  DecompositionReport rep;
  const std::size_t n = g.num_vertices();
  const auto& t = d.forest;

  bool structural = t.n == n;
  if (structural) {
    UnionFind uf(n);
    for (const auto& e : t.edges) {
      if (e.a >= n || e.b >= n || !g.has_edge(e.a, e.b)) {
        structural = false;
        rep.detail += "forest edge not in graph; ";
        break;
      }
      if (!uf.unite(e.a, e.b)) {
        structural = false;
        rep.detail += "forest has a cycle; ";
        break;
      }
    }
  } else {
    rep.detail += "forest size mismatch; ";
  }
  for (Vertex b : d.bad)
    if (b >= n) structural = false;

  auto same_partition = [&](const Components& host, const Components& forest,
                            std::span<const char> removed) -> std::optional<std::pair<Vertex, Vertex>> {
    std::vector<std::int64_t> first(host.count, -1);
    for (Vertex x : u) {
      if (removed[x]) continue;
      auto c = static_cast<std::size_t>(host.id[x]);
      if (first[c] < 0) {
        first[c] = x;
      } else if (!forest.connected(static_cast<Vertex>(first[c]), x)) {
        return std::make_pair(static_cast<Vertex>(first[c]), x);
      }
    }
    return std::nullopt;
  };

  if (structural) {
    const Graph tg = t.as_graph();
    std::vector<char> none(n, 0);
    auto w1 = same_partition(components(g), components(tg), none);
    auto bad_mask = vertex_mask(n, d.bad);
    auto w2 = same_partition(components_masked(g, bad_mask), components_masked(tg, bad_mask), bad_mask);
    rep.p1_witness = w1 ? w1 : w2;
    rep.p1_holds = !rep.p1_witness;
    if (w1) rep.detail += "T is not a Steiner forest for U; ";
    if (w2) rep.detail += "T - B is not a Steiner forest for U - B in G - B; ";

    rep.p2_holds = true;
    for (Vertex v = 0; v < n && rep.p2_holds; ++v) {
      if (bad_mask[v]) continue;
      std::size_t deg = 0;
      for (Vertex w : tg.neighbors(v))
        if (!bad_mask[w]) ++deg;
      if (deg > r) {
        rep.p2_holds = false;
        rep.p2_witness = v;
        rep.detail += "vertex " + std::to_string(v) + " has degree " + std::to_string(deg) +
                      " in T - B; ";
      }
    }
  }

  const std::size_t k = u.size();
  const std::size_t bad_terms = static_cast<std::size_t>(std::count_if(
      d.bad.begin(), d.bad.end(), [&](Vertex b) { return u.contains(b); }));
  const bool bound_all = d.bad.empty() || d.bad.size() * (r - 2) < k;
  const bool bound_terms = bad_terms == 0 || bad_terms * (r - 1) < k;
  rep.p3_holds = r >= 3 && bound_all && bound_terms;
  if (!bound_all) rep.detail += "|B| >= |U|/(r-2); ";
  if (!bound_terms) rep.detail += "|B n U| >= |U|/(r-1); ";
  return rep;
}

/// Number of forest vertices of degree >= r. Throws if it exceeds the per-tree
/// bound (leaves - 2)/(r - 2), which holds whenever every leaf is a terminal.
inline std::size_t count_high_degree_bound(const SteinerForest& forest, std::size_t r) {
  if (r < 3) throw Error("threshold must be at least 3");
  const Graph tg = forest.as_graph();
  auto comps = components(tg);
  std::vector<std::size_t> leaves(comps.count, 0);
  std::vector<std::size_t> high(comps.count, 0);
  std::size_t total = 0;
  for (Vertex v = 0; v < forest.n; ++v) {
    auto c = static_cast<std::size_t>(comps.id[v]);
    if (forest.degree[v] == 1) ++leaves[c];
    if (forest.degree[v] >= r) {
      ++high[c];
      ++total;
    }
  }
  for (std::size_t c = 0; c < comps.count; ++c)
    if (high[c] * (r - 2) + 2 > leaves[c] && high[c] > 0)
      throw InternalBoundViolated("tree has more high-degree vertices than (leaves-2)/(r-2)");
  return total;
}

/// Steiner forest plus high-degree set with: T - B Steiner for U - B in G - B,
/// max degree of T - B at most r, and few high-degree vertices.
inline Decomposition decompose(const Graph& g, const TerminalSet& u, std::size_t r,
                               DecompositionOptions options = {}) {
  if (r < 3) throw Error("decomposition threshold must be at least 3");
  const std::size_t n = g.num_vertices();
  const std::size_t cap = options.max_swaps ? options.max_swaps : 50 * std::max<std::size_t>(n, 1);

  detail::WorkingTree tree(n, u);
  for (const auto& e : minimal_steiner_forest(g, u).edges) tree.add_edge(e.a, e.b);

  for (std::size_t swaps = 0;; ++swaps) {
    if (swaps > cap)
      throw DecompositionFailed("swap limit of " + std::to_string(cap) + " reached");
    detail::SwapSearch search(g, tree, r);
    auto outcome = search.run();
    if (outcome == detail::SwapSearch::Outcome::Improved) continue;

    Decomposition d{tree.to_forest(), search.bad_set(), r};
    auto report = verify_decomposition(g, u, r, d);
    if (!report.all())
      throw DecompositionFailed("decomposition check failed: " + report.detail);
    return d;
  }
}

}  // namespace ftsc
