#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ftsc/bits.hpp"
#include "ftsc/decomp.hpp"
#include "ftsc/graph.hpp"
#include "ftsc/scheme.hpp"
#include "ftsc/st_labels.hpp"
#include "ftsc/subset_label.hpp"

namespace ftsc {

/// Degree threshold max(3, ceil(u^(1 - 1/2^(k-1)))) for recursion level k >= 2.
inline std::size_t warmup_threshold(std::size_t k, std::size_t u_size) {
  if (k < 2) throw Error("warm-up threshold needs level k >= 2");
  if (u_size <= 1) return 3;
  const long double exponent = 1.0L - std::ldexp(1.0L, -static_cast<int>(std::min<std::size_t>(k - 1, 60)));
  auto c = static_cast<std::size_t>(std::ceil(std::pow(static_cast<long double>(u_size), exponent) - 1e-9L));
  return std::max<std::size_t>(3, c);
}

struct WarmupLabel;
using WarmupRef = std::shared_ptr<const WarmupLabel>;

struct WarmupLabel {
  Vertex owner = 0;
  std::size_t level = 1;
  /// Vertices deleted from the input graph to obtain this level's instance H, sorted.
  VertexSet removed;
  std::uint32_t build_id = 0;

  /// Level 1: the owner alone is a Steiner cut of H.
  bool cut_bit = false;

  /// Levels >= 2.
  std::shared_ptr<const StarLabel> self;
  /// Separation of U_H - F already present in H; needed when H's terminals are not all connected.
  SubsetLabel hat_empty;
  bool high_degree = false;
  /// The owner alone is a Steiner cut of H; answers F = {y} for high-degree y.
  bool self_cut = false;
  /// (y, label of the owner for H - y) for every high-degree y other than the owner.
  std::vector<std::pair<Vertex, WarmupRef>> children;
  /// Forest neighbours; present iff the owner is not high-degree.
  std::vector<std::shared_ptr<const StarLabel>> neighbor_stars;

  const WarmupLabel* child_for(Vertex y) const {
    auto it = std::lower_bound(children.begin(), children.end(), y,
                               [](const auto& c, Vertex key) { return c.first < key; });
    return it != children.end() && it->first == y ? it->second.get() : nullptr;
  }

  /// Stored (l, reach) pairs across all recursion levels.
  std::size_t star_entries() const {
    if (level == 1) return 0;
    std::size_t total = 1 + neighbor_stars.size();
    for (const auto& [y, child] : children) total += child->star_entries();
    return total;
  }
};

struct WarmupOptions {
  /// Refuse builds needing more recursive sub-instances than this.
  std::size_t max_subinstances = 1'000'000;
  const StProvider* provider = nullptr;
};

namespace detail {

struct WarmupBuilder {
  const Graph& g;
  const TerminalSet& u;
  WarmupOptions options;
  std::uint32_t build_id;
  std::size_t subinstances = 0;

  const StProvider& provider() const { return options.provider ? *options.provider : exhaustive_backend(); }

  /// Labels of every vertex of H = g - removed at recursion level k.
  std::vector<WarmupRef> build(const VertexSet& removed, std::size_t k) {
    if (++subinstances > options.max_subinstances)
      throw RecursionBudgetExceeded("warm-up build needs more than " + std::to_string(options.max_subinstances) +
                                    " sub-instances");
    const std::size_t n = g.num_vertices();
    const auto removed_mask = vertex_mask(n, removed);
    std::vector<Edge> edges;
    for (const auto& e : g.edges())
      if (!removed_mask[e.a] && !removed_mask[e.b]) edges.push_back(e);
    const Graph h(n, std::move(edges));
    VertexSet uh;
    for (Vertex t : u)
      if (!removed_mask[t]) uh.push_back(t);
    const TerminalSet terminals(uh, n);

    std::vector<std::shared_ptr<WarmupLabel>> out(n);
    for (Vertex x = 0; x < n; ++x) {
      if (removed_mask[x]) continue;
      auto l = std::make_shared<WarmupLabel>();
      l->owner = x;
      l->level = k;
      l->removed = removed;
      l->build_id = build_id;
      const Vertex single[] = {x};
      const bool cut = is_steiner_cut(h, terminals, single);
      if (k == 1) l->cut_bit = cut;
      else l->self_cut = cut;
      out[x] = std::move(l);
    }
    if (k > 1) {
      const SteinerForest forest = minimal_steiner_forest(h, terminals);
      const std::size_t r = warmup_threshold(k, terminals.size());
      VertexSet bad;
      for (Vertex v = 0; v < n; ++v)
        if (forest.degree[v] >= r) bad.push_back(v);
      const auto bad_mask = vertex_mask(n, bad);
      const auto adj = forest.adjacency();
      auto built = build_star_labels(h, terminals, k, provider());
      std::vector<std::shared_ptr<const StarLabel>> stars(n);
      for (Vertex v = 0; v < n; ++v) stars[v] = std::make_shared<const StarLabel>(std::move(built[v]));
      const SubsetLabel hat_empty = build_subset_label(h, terminals, {}, k);
      for (Vertex x = 0; x < n; ++x) {
        if (!out[x]) continue;
        out[x]->self = stars[x];
        out[x]->hat_empty = hat_empty;
        out[x]->high_degree = bad_mask[x] != 0;
        if (!bad_mask[x])
          for (Vertex y : adj[x]) out[x]->neighbor_stars.push_back(stars[y]);
      }
      for (Vertex y : bad) {
        VertexSet next = removed;
        next.insert(std::upper_bound(next.begin(), next.end(), y), y);
        auto sub = build(next, k - 1);
        for (Vertex x = 0; x < n; ++x)
          if (out[x] && x != y) out[x]->children.emplace_back(y, sub[x]);
      }
    }
    return {out.begin(), out.end()};
  }
};

}  // namespace detail

/// Labels for every vertex at level f.
inline std::vector<WarmupRef> build_warmup_labels(const Graph& g, const TerminalSet& u, std::size_t f,
                                                  WarmupOptions options = {}) {
  if (f == 0) throw Error("fault bound f must be at least 1");
  ByteWriter w;
  w.varint(g.num_vertices());
  for (const auto& e : g.edges()) {
    w.varint(e.a);
    w.varint(e.b);
  }
  for (Vertex t : u) w.varint(t);
  w.varint(f);
  detail::WarmupBuilder builder{g, u, options, crc32(w.bytes()) ^ 0x5a5a5a5au};
  return builder.build({}, f);
}

/// Decides whether the owners of `labels` form a Steiner cut of the labels' instance.
inline bool query_warmup(std::span<const WarmupLabel* const> labels) {
  if (labels.empty()) throw Error("query needs at least one fault label");
  const WarmupLabel& head = *labels.front();
  for (const WarmupLabel* l : labels)
    if (l->level != head.level || l->removed != head.removed || l->build_id != head.build_id)
      throw LabelMixError("warm-up labels come from different instances");
  if (labels.size() > head.level)
    throw Error("query has " + std::to_string(labels.size()) + " faults at level " + std::to_string(head.level));
  VertexSet faults;
  for (const WarmupLabel* l : labels) faults.push_back(l->owner);
  faults = normalize(std::move(faults));
  if (faults.size() != labels.size()) throw Error("duplicate fault label");

  if (head.level == 1) return head.cut_bit;
  if (query_subset_label(head.hat_empty, std::span<const Vertex>(faults))) return true;

  // One-high-deg: recurse into H - y for the smallest high-degree fault y.
  const WarmupLabel* pivot = nullptr;
  for (const WarmupLabel* l : labels)
    if (l->high_degree && (!pivot || l->owner < pivot->owner)) pivot = l;
  if (pivot) {
    if (labels.size() == 1) return pivot->self_cut;
    std::vector<const WarmupLabel*> rest;
    for (const WarmupLabel* l : labels) {
      if (l == pivot) continue;
      const WarmupLabel* child = l->child_for(pivot->owner);
      if (!child) throw LabelMixError("warm-up label lacks the recursive entry for a high-degree fault");
      rest.push_back(child);
    }
    return query_warmup(std::span<const WarmupLabel* const>(rest));
  }

  // All-low-deg: stored forest neighbours that still reach a terminal must agree.
  std::vector<const StLabel*> fault_st;
  std::vector<const ReachLabel*> fault_reach;
  std::vector<const StarLabel*> candidates;
  for (const WarmupLabel* l : labels) {
    fault_st.push_back(&l->self->st);
    fault_reach.push_back(&l->self->reach);
  }
  for (const WarmupLabel* l : labels)
    for (const auto& s : l->neighbor_stars)
      if (!set_contains(faults, s->vertex)) candidates.push_back(s.get());
  std::sort(candidates.begin(), candidates.end(), [](auto* a, auto* b) { return a->vertex < b->vertex; });
  const StarLabel* anchor = nullptr;
  for (const StarLabel* w : candidates) {
    if (anchor && anchor->vertex == w->vertex) continue;
    if (!query_reach(w->reach, std::span<const ReachLabel* const>(fault_reach))) continue;
    if (!anchor) {
      anchor = w;
      continue;
    }
    if (!query_st(std::span<const StLabel* const>(fault_st), anchor->st, w->st)) return true;
  }
  return false;
}

inline bool query_warmup_faults(const std::vector<WarmupRef>& all, std::span<const Vertex> faults) {
  std::vector<const WarmupLabel*> ptrs;
  for (Vertex v : faults) ptrs.push_back(all.at(v).get());
  return query_warmup(std::span<const WarmupLabel* const>(ptrs));
}

// ---------------------------------------------------------------------------
// Serialization: a straightforward recursive record, shared payloads deduplicated.

namespace detail {

constexpr std::uint32_t kWarmupMagic = make_tag('F', 'T', 'W', 'U');
constexpr std::uint64_t kWarmupVersion = 1;

struct WarmupWriter {
  ByteWriter& w;
  std::vector<const Bytes*> blobs;
  ByteWriter body;

  std::size_t blob_index(const Bytes& b) {
    for (std::size_t i = 0; i < blobs.size(); ++i)
      if (*blobs[i] == b) return i;
    blobs.push_back(&b);
    return blobs.size() - 1;
  }

  void star(const StarLabel& s) {
    body.varint(s.vertex);
    body.varint(blob_index(s.st.payload));
    body.varint(blob_index(s.reach.self.payload));
    body.varint(blob_index(s.reach.apex.payload));
  }

  void label(const WarmupLabel& l) {
    body.varint(l.owner);
    body.varint(l.level);
    write_vertex_list(body, l.removed);
    if (l.level == 1) {
      body.byte(l.cut_bit ? 1 : 0);
      return;
    }
    star(*l.self);
    write_bits(body, serialize_subset_label(l.hat_empty));
    body.byte(static_cast<std::uint8_t>((l.high_degree ? 1 : 0) | (l.self_cut ? 2 : 0)));
    body.varint(l.neighbor_stars.size());
    for (const auto& s : l.neighbor_stars) star(*s);
    body.varint(l.children.size());
    for (const auto& [y, child] : l.children) {
      body.varint(y);
      label(*child);
    }
  }
};

struct WarmupReader {
  std::vector<Bytes> blobs;
  std::size_t n = 0;
  std::uint32_t build_id = 0;
  std::size_t f = 0;

  std::shared_ptr<const StarLabel> star(ByteReader& in) const {
    StarLabel s;
    s.vertex = static_cast<Vertex>(in.varint_below(n, "star vertex"));
    const auto& a = blobs.at(static_cast<std::size_t>(in.varint_below(blobs.size(), "blob index")));
    const auto& b = blobs.at(static_cast<std::size_t>(in.varint_below(blobs.size(), "blob index")));
    const auto& c = blobs.at(static_cast<std::size_t>(in.varint_below(blobs.size(), "blob index")));
    s.st = StLabel{s.vertex, a};
    s.reach = ReachLabel{s.vertex, StLabel{s.vertex, b}, StLabel{static_cast<Vertex>(n), c}};
    return std::make_shared<const StarLabel>(std::move(s));
  }

  WarmupRef label(ByteReader& in, std::size_t depth) const {
    if (depth > f) throw MalformedBits("warm-up recursion deeper than f");
    auto l = std::make_shared<WarmupLabel>();
    l->owner = static_cast<Vertex>(in.varint_below(n, "owner"));
    l->level = static_cast<std::size_t>(in.varint_below(f + 1, "level"));
    if (l->level == 0) throw MalformedBits("warm-up level 0");
    l->removed = read_sorted_vertices(in, n);
    l->build_id = build_id;
    if (l->level == 1) {
      const auto bit = in.byte();
      if (bit > 1) throw MalformedBits("bad cut bit");
      l->cut_bit = bit == 1;
      return l;
    }
    l->self = star(in);
    if (l->self->vertex != l->owner) throw MalformedBits("own entry belongs to another vertex");
    l->hat_empty = deserialize_subset_label(read_bits(in), n, l->level);
    const auto flags = in.byte();
    if (flags > 3) throw MalformedBits("bad warm-up flags");
    l->high_degree = (flags & 1) != 0;
    l->self_cut = (flags & 2) != 0;
    const auto nbrs = in.varint_below(n + 1, "neighbour count");
    for (std::uint64_t i = 0; i < nbrs; ++i) l->neighbor_stars.push_back(star(in));
    const auto kids = in.varint_below(n + 1, "child count");
    for (std::uint64_t i = 0; i < kids; ++i) {
      const auto y = static_cast<Vertex>(in.varint_below(n, "child key"));
      if (!l->children.empty() && l->children.back().first >= y) throw MalformedBits("child keys out of order");
      auto child = label(in, depth + 1);
      if (child->owner != l->owner || child->level + 1 != l->level) throw MalformedBits("inconsistent child label");
      l->children.emplace_back(y, std::move(child));
    }
    return l;
  }
};

}  // namespace detail

inline Bytes serialize_warmup_label(const WarmupLabel& l, std::size_t n, std::size_t f) {
  ByteWriter out;
  detail::WarmupWriter writer{out, {}, {}};
  writer.label(l);
  out.u32(detail::kWarmupMagic);
  out.varint(detail::kWarmupVersion);
  out.varint(n);
  out.varint(f);
  out.u32(l.build_id);
  out.varint(writer.blobs.size());
  for (const Bytes* b : writer.blobs) out.blob(*b);
  out.raw(writer.body.bytes());
  detail::append_crc(out);
  return out.take();
}

inline WarmupRef deserialize_warmup_label(std::span<const std::uint8_t> bytes) {
  ByteReader in(detail::check_crc(bytes));
  if (in.u32() != detail::kWarmupMagic) throw MalformedBits("not a warm-up label");
  if (in.varint() != detail::kWarmupVersion) throw MalformedBits("unsupported warm-up label version");
  detail::WarmupReader reader;
  reader.n = static_cast<std::size_t>(in.varint_below(std::uint64_t{1} << 32, "vertex count"));
  reader.f = static_cast<std::size_t>(in.varint_below(std::uint64_t{1} << 16, "fault bound"));
  reader.build_id = in.u32();
  const auto blob_count = in.varint_below(bytes.size() + 1, "blob count");
  for (std::uint64_t i = 0; i < blob_count; ++i) {
    auto b = in.blob();
    reader.blobs.emplace_back(b.begin(), b.end());
  }
  auto l = reader.label(in, 0);
  if (l->level != reader.f) throw MalformedBits("top-level warm-up label not at level f");
  in.expect_done();
  return l;
}

}  // namespace ftsc
