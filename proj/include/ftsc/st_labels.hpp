#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ftsc/bits.hpp"
#include "ftsc/graph.hpp"

namespace ftsc {

using Bytes = std::vector<std::uint8_t>;

/// Pairwise fault-tolerant connectivity label. The payload is opaque to everything
/// except the backend named by its first four bytes.
struct StLabel {
  Vertex vertex = 0;
  Bytes payload;

  std::uint32_t backend() const {
    if (payload.size() < 4) throw MalformedBits("payload shorter than its backend tag");
    return std::uint32_t{payload[0]} | std::uint32_t{payload[1]} << 8 |
           std::uint32_t{payload[2]} << 16 | std::uint32_t{payload[3]} << 24;
  }

  friend bool operator==(const StLabel&, const StLabel&) = default;
};

/// Terminal-reach label: the pair of pairwise labels of v and of the apex z in the
/// graph augmented with z adjacent to every terminal.
struct ReachLabel {
  Vertex vertex = 0;
  StLabel self;
  StLabel apex;

  friend bool operator==(const ReachLabel&, const ReachLabel&) = default;
};

/// (v, l(v), reach(v)): the unit stored by the scheme labels.
struct StarLabel {
  Vertex vertex = 0;
  StLabel st;
  ReachLabel reach;

  friend bool operator==(const StarLabel&, const StarLabel&) = default;
};

/// Backend contract for pairwise labels. Implementations must answer from label
/// bytes alone.
class StProvider {
 public:
  virtual ~StProvider() = default;
  virtual std::uint32_t tag() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<StLabel> build(const Graph& g, std::size_t f) const = 0;
  /// s and t connected after deleting the owners of `faults`.
  virtual bool connected(std::span<const StLabel* const> faults, const StLabel& s,
                         const StLabel& t) const = 0;
};

constexpr std::uint32_t make_tag(char a, char b, char c, char d) {
  return std::uint32_t(std::uint8_t(a)) | std::uint32_t(std::uint8_t(b)) << 8 |
         std::uint32_t(std::uint8_t(c)) << 16 | std::uint32_t(std::uint8_t(d)) << 24;
}

/// Every payload carries the whole graph; queries decode it and run a BFS.
/// Wire format: tag(4 bytes) version vertex n m, then edges sorted by (a, b) as
/// varint pairs (a - previous a, b - a - 1 when a changed else b - previous b - 1).
class ExhaustiveBackend final : public StProvider {
 public:
  static constexpr std::uint32_t kTag = make_tag('E', 'X', 'H', 'G');
  static constexpr std::uint64_t kVersion = 1;

  std::uint32_t tag() const override { return kTag; }
  std::string name() const override { return "exhaustive"; }

  std::vector<StLabel> build(const Graph& g, std::size_t f) const override {
    if (f == 0) throw Error("pairwise labels need f >= 1");
    ByteWriter body;
    body.varint(g.num_vertices());
    body.varint(g.num_edges());
    Vertex prev_a = 0;
    Vertex prev_b = 0;
    bool first = true;
    for (const auto& e : g.edges()) {
      const Vertex da = e.a - prev_a;
      body.varint(da);
      body.varint(first || da != 0 ? e.b - e.a - 1 : e.b - prev_b - 1);
      prev_a = e.a;
      prev_b = e.b;
      first = false;
    }
    const Bytes& graph_bytes = body.bytes();

    std::vector<StLabel> out(g.num_vertices());
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      ByteWriter w;
      w.u32(kTag);
      w.varint(kVersion);
      w.varint(v);
      w.raw(graph_bytes);
      out[v] = StLabel{v, w.take()};
    }
    return out;
  }

  bool connected(std::span<const StLabel* const> faults, const StLabel& s,
                 const StLabel& t) const override {
    auto src = decode(s.payload);
    auto dst = decode(t.payload);
    if (!std::equal(src.graph_bytes.begin(), src.graph_bytes.end(), dst.graph_bytes.begin(),
                    dst.graph_bytes.end()))
      throw LabelMixError("pairwise labels come from different graphs");
    std::vector<char> removed(src.n, 0);
    for (const StLabel* fl : faults) {
      auto fd = decode(fl->payload);
      if (!std::equal(src.graph_bytes.begin(), src.graph_bytes.end(), fd.graph_bytes.begin(),
                      fd.graph_bytes.end()))
        throw LabelMixError("pairwise labels come from different graphs");
      removed[fd.vertex] = 1;
    }
    if (removed[src.vertex] || removed[dst.vertex]) return false;
    if (src.vertex == dst.vertex) return true;

    auto adj = adjacency(src);
    std::vector<char> seen(src.n, 0);
    std::deque<Vertex> queue{src.vertex};
    seen[src.vertex] = 1;
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      for (Vertex w : adj[v]) {
        if (seen[w] || removed[w]) continue;
        if (w == dst.vertex) return true;
        seen[w] = 1;
        queue.push_back(w);
      }
    }
    return false;
  }

  struct Decoded {
    Vertex vertex = 0;
    std::size_t n = 0;
    std::vector<Edge> edges;
    std::span<const std::uint8_t> graph_bytes;
  };

  static Decoded decode(std::span<const std::uint8_t> payload) {
    ByteReader in(payload);
    if (in.u32() != kTag) throw BackendMismatch("payload is not an exhaustive-backend label");
    if (in.varint() != kVersion) throw MalformedBits("unsupported exhaustive payload version");
    Decoded d;
    const auto vertex = in.varint();
    const auto body_start = in.position();
    d.n = static_cast<std::size_t>(in.varint_below(std::uint64_t{1} << 32, "vertex count"));
    if (vertex >= d.n) throw MalformedBits("label owner outside the graph");
    d.vertex = static_cast<Vertex>(vertex);
    const auto m = in.varint_below(payload.size() + 1, "edge count");
    d.edges.reserve(static_cast<std::size_t>(m));
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      const auto da = in.varint();
      const auto code = in.varint();
      a += da;
      b = (i == 0 || da != 0) ? a + 1 + code : b + 1 + code;
      if (a >= d.n || b >= d.n) throw MalformedBits("edge endpoint outside the graph");
      d.edges.push_back(Edge{static_cast<Vertex>(a), static_cast<Vertex>(b)});
    }
    in.expect_done();
    d.graph_bytes = payload.subspan(body_start);
    return d;
  }

 private:
  static std::vector<VertexSet> adjacency(const Decoded& d) {
    std::vector<VertexSet> adj(d.n);
    for (const auto& e : d.edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    return adj;
  }
};

inline const StProvider& exhaustive_backend() {
  static const ExhaustiveBackend backend;
  return backend;
}

/// Provider registered under a backend tag.
inline const StProvider& provider_for(std::uint32_t tag) {
  if (tag == ExhaustiveBackend::kTag) return exhaustive_backend();
  throw BackendMismatch("unknown pairwise-label backend tag " + std::to_string(tag));
}

inline std::vector<StLabel> build_st_labels(const Graph& g, std::size_t f,
                                            const StProvider& provider = exhaustive_backend()) {
  return provider.build(g, f);
}

inline bool query_st(std::span<const StLabel* const> faults, const StLabel& s, const StLabel& t) {
  const std::uint32_t tag = s.backend();
  if (t.backend() != tag) throw BackendMismatch("s and t labels use different backends");
  for (const StLabel* fl : faults)
    if (fl->backend() != tag) throw BackendMismatch("fault label uses a different backend");
  return provider_for(tag).connected(faults, s, t);
}

inline bool query_st(std::span<const StLabel> faults, const StLabel& s, const StLabel& t) {
  std::vector<const StLabel*> ptrs;
  ptrs.reserve(faults.size());
  for (const auto& fl : faults) ptrs.push_back(&fl);
  return query_st(std::span<const StLabel* const>(ptrs), s, t);
}

/// Apex graph: g plus vertex n adjacent to every terminal.
inline Graph apex_graph(const Graph& g, const TerminalSet& u) {
  std::vector<Edge> edges = g.edges();
  const auto z = static_cast<Vertex>(g.num_vertices());
  for (Vertex t : u) edges.push_back(Edge{t, z});
  return Graph(g.num_vertices() + 1, std::move(edges));
}

inline std::vector<ReachLabel> build_reach_labels(const Graph& g, const TerminalSet& u, std::size_t f,
                                                  const StProvider& provider = exhaustive_backend()) {
  auto prime = provider.build(apex_graph(g, u), f);
  const StLabel& apex = prime.back();
  std::vector<ReachLabel> out(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) out[v] = ReachLabel{v, prime[v], apex};
  return out;
}

/// Some terminal shares x's component after deleting the owners of `faults`.
inline bool query_reach(const ReachLabel& x, std::span<const ReachLabel* const> faults) {
  std::vector<const StLabel*> prime;
  prime.reserve(faults.size());
  for (const ReachLabel* fl : faults) prime.push_back(&fl->self);
  return query_st(std::span<const StLabel* const>(prime), x.self, x.apex);
}

inline bool query_reach(const ReachLabel& x, std::span<const ReachLabel> faults) {
  std::vector<const ReachLabel*> ptrs;
  for (const auto& fl : faults) ptrs.push_back(&fl);
  return query_reach(x, std::span<const ReachLabel* const>(ptrs));
}

inline std::vector<StarLabel> build_star_labels(const Graph& g, const TerminalSet& u, std::size_t f,
                                                const StProvider& provider = exhaustive_backend()) {
  auto st = build_st_labels(g, f, provider);
  auto reach = build_reach_labels(g, u, f, provider);
  std::vector<StarLabel> out(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    out[v] = StarLabel{v, std::move(st[v]), std::move(reach[v])};
  return out;
}

inline void write_st_label(ByteWriter& out, const StLabel& l) { out.blob(l.payload); }

inline StLabel read_st_label(ByteReader& in, Vertex owner) {
  auto blob = in.blob();
  return StLabel{owner, Bytes(blob.begin(), blob.end())};
}

}  // namespace ftsc
