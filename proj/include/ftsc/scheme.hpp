#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ftsc/bits.hpp"
#include "ftsc/decomp.hpp"
#include "ftsc/graph.hpp"
#include "ftsc/st_labels.hpp"
#include "ftsc/subset_label.hpp"

namespace ftsc {

using StarRef = std::shared_ptr<const StarLabel>;

/// How a label answers queries.
enum class SchemeMode : std::uint8_t {
  /// At most one terminal: nothing can be separated.
  NoTerminals = 0,
  /// f = 1: one bit telling whether the owner alone is a Steiner cut.
  SingleBit = 1,
  /// f >= 2: the full construction.
  Full = 2,
};

/// Identifies one build; labels from different builds must not be queried together.
struct BuildInfo {
  std::size_t n = 0;
  std::size_t f = 0;
  std::size_t r = 0;
  std::size_t terminals = 0;
  std::uint32_t build_id = 0;

  friend bool operator==(const BuildInfo&, const BuildInfo&) = default;
};

/// Fingerprint of (graph, terminals, f).
inline std::uint32_t instance_fingerprint(const Graph& g, const TerminalSet& u, std::size_t f) {
  ByteWriter w;
  w.varint(g.num_vertices());
  for (const auto& e : g.edges()) {
    w.varint(e.a);
    w.varint(e.b);
  }
  w.varint(u.size());
  for (Vertex t : u) w.varint(t);
  w.varint(f);
  return crc32(w.bytes());
}

struct SchemeLabel {
  Vertex owner = 0;
  SchemeMode mode = SchemeMode::Full;
  BuildInfo info;

  bool cut_bit = false;

  StarRef star_self;
  /// Null when no terminal is reachable from the owner in G - B.
  StarRef star_ux;
  /// One per high-degree vertex, sorted by vertex.
  std::vector<StarRef> star_bad;
  SubsetLabel hat_empty;
  /// Forest neighbours in T - B; present iff the owner is not high-degree.
  std::optional<std::vector<StarRef>> low_deg_neighbors;
  /// Every K within B containing the owner with |K| <= f, lexicographic by members.
  std::optional<std::vector<std::pair<VertexSet, SubsetLabel>>> hat_map;

  VertexSet bad_ids() const {
    VertexSet out;
    out.reserve(star_bad.size());
    for (const auto& s : star_bad) out.push_back(s->vertex);
    return out;
  }

  const SubsetLabel* find_hat(const VertexSet& k) const {
    if (!hat_map) return nullptr;
    auto it = std::lower_bound(hat_map->begin(), hat_map->end(), k,
                               [](const auto& entry, const VertexSet& key) { return entry.first < key; });
    return it != hat_map->end() && it->first == k ? &it->second : nullptr;
  }

  /// Stored (v, l(v), reach(v)) slots: self, u_x (possibly empty), B, neighbours.
  std::size_t star_entries() const {
    if (mode != SchemeMode::Full) return 0;
    return 2 + star_bad.size() + (low_deg_neighbors ? low_deg_neighbors->size() : 0);
  }

  /// Stored subset labels: the empty-set label plus the per-K ones.
  std::size_t hat_entries() const {
    if (mode != SchemeMode::Full) return 0;
    return 1 + (hat_map ? hat_map->size() : 0);
  }
};

inline bool same_star(const StarRef& a, const StarRef& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

inline bool operator==(const SchemeLabel& x, const SchemeLabel& y) {
  auto same_list = [](const std::vector<StarRef>& a, const std::vector<StarRef>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), same_star);
  };
  if (x.owner != y.owner || x.mode != y.mode || !(x.info == y.info) || x.cut_bit != y.cut_bit) return false;
  if (x.mode != SchemeMode::Full) return true;
  if (!same_star(x.star_self, y.star_self) || !same_star(x.star_ux, y.star_ux)) return false;
  if (!same_list(x.star_bad, y.star_bad) || !(x.hat_empty == y.hat_empty)) return false;
  if (x.low_deg_neighbors.has_value() != y.low_deg_neighbors.has_value()) return false;
  if (x.low_deg_neighbors && !same_list(*x.low_deg_neighbors, *y.low_deg_neighbors)) return false;
  return x.hat_map == y.hat_map;
}

/// Degree threshold ceil(k^(1 - 1/f)) + 2.
inline std::size_t scheme_threshold(std::size_t k, std::size_t f) {
  if (k <= 1) return 3;
  // Smallest c with c^f >= k^(f-1), evaluated exactly while it fits in 128 bits.
  auto power = [](unsigned __int128 base, std::size_t e, bool& overflow) {
    unsigned __int128 acc = 1;
    constexpr unsigned __int128 limit = static_cast<unsigned __int128>(1) << 120;
    for (std::size_t i = 0; i < e; ++i) {
      if (acc > limit / base) {
        overflow = true;
        return acc;
      }
      acc *= base;
    }
    return acc;
  };
  auto c = static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<long double>(k), 1.0L - 1.0L / static_cast<long double>(f))));
  bool overflow = false;
  const auto target = power(k, f - 1, overflow);
  if (!overflow) {
    while (c > 1 && !overflow && power(c - 1, f, overflow) >= target) --c;
    overflow = false;
    while (power(c, f, overflow) < target && !overflow) ++c;
  }
  return c + 2;
}

struct QueryAnswer {
  bool yes = false;
  /// Two stored vertices that reach terminals but are disconnected in G - F.
  std::optional<std::pair<Vertex, Vertex>> disconnected_pair;
  /// The high-degree subset K = F n B that already separates U - F.
  std::optional<VertexSet> separating_subset;
};

struct QueryOptions {
  /// Use the largest-id vertex of W as the anchor w* instead of the smallest.
  bool largest_anchor = false;
};

struct BuildOptions {
  const StProvider* provider = nullptr;
  DecompositionOptions decomp;
  /// Overrides the degree threshold when nonzero (at least 3).
  std::size_t threshold = 0;
};

/// Labels for every vertex, built by one invocation.
inline std::vector<SchemeLabel> build_labels(const Graph& g, const TerminalSet& u, std::size_t f,
                                             BuildOptions options = {}) {
  const StProvider& provider = options.provider ? *options.provider : exhaustive_backend();
  if (f == 0) throw Error("fault bound f must be at least 1");
  const std::size_t n = g.num_vertices();
  BuildInfo info{n, f, 0, u.size(), instance_fingerprint(g, u, f)};
  std::vector<SchemeLabel> labels(n);
  for (Vertex x = 0; x < n; ++x) labels[x].owner = x;

  if (u.size() <= 1) {
    for (auto& l : labels) {
      l.mode = SchemeMode::NoTerminals;
      l.info = info;
    }
    return labels;
  }

  if (f == 1) {
    for (Vertex x = 0; x < n; ++x) {
      labels[x].mode = SchemeMode::SingleBit;
      labels[x].info = info;
      const Vertex single[] = {x};
      labels[x].cut_bit = is_steiner_cut(g, u, single);
    }
    return labels;
  }

  if (options.threshold != 0 && options.threshold < 3) throw Error("threshold must be at least 3");
  info.r = options.threshold != 0 ? options.threshold : scheme_threshold(u.size(), f);
  const Decomposition dec = decompose(g, u, info.r, options.decomp);
  const VertexSet& bad = dec.bad;
  const auto bad_mask = vertex_mask(n, bad);

  // u_x: smallest terminal sharing x's component of G - B.
  const auto comps = components_masked(g, bad_mask);
  std::vector<std::int64_t> rep(comps.count, -1);
  for (Vertex t : u)
    if (!bad_mask[t] && rep[static_cast<std::size_t>(comps.id[t])] < 0)
      rep[static_cast<std::size_t>(comps.id[t])] = t;

  std::vector<StarRef> stars(n);
  {
    auto built = build_star_labels(g, u, f, provider);
    for (Vertex v = 0; v < n; ++v) stars[v] = std::make_shared<const StarLabel>(std::move(built[v]));
  }
  std::vector<StarRef> star_bad;
  for (Vertex b : bad) star_bad.push_back(stars[b]);
  const SubsetLabel hat_empty = build_subset_label(g, u, {}, f);
  const auto forest_adj = dec.forest.adjacency();

  std::map<VertexSet, SubsetLabel> hat_cache;
  auto hat_for = [&](const VertexSet& k) -> const SubsetLabel& {
    auto it = hat_cache.find(k);
    if (it == hat_cache.end()) it = hat_cache.emplace(k, build_subset_label(g, u, k, f)).first;
    return it->second;
  };

  for (Vertex x = 0; x < n; ++x) {
    SchemeLabel& l = labels[x];
    l.mode = SchemeMode::Full;
    l.info = info;
    l.star_self = stars[x];
    if (!bad_mask[x]) {
      auto r = rep[static_cast<std::size_t>(comps.id[x])];
      if (r >= 0) l.star_ux = stars[static_cast<std::size_t>(r)];
    }
    l.star_bad = star_bad;
    l.hat_empty = hat_empty;
    if (!bad_mask[x]) {
      std::vector<StarRef> nbrs;
      for (Vertex y : forest_adj[x])
        if (!bad_mask[y]) nbrs.push_back(stars[y]);
      l.low_deg_neighbors = std::move(nbrs);
      continue;
    }
    // Subsets K of B with x in K and |K| <= f, in lexicographic order of members.
    VertexSet others;
    for (Vertex b : bad)
      if (b != x) others.push_back(b);
    std::vector<VertexSet> subsets;
    VertexSet pick;
    auto rec = [&](auto&& self, std::size_t from) -> void {
      VertexSet k = pick;
      k.insert(std::upper_bound(k.begin(), k.end(), x), x);
      subsets.push_back(std::move(k));
      if (pick.size() + 1 >= f) return;
      for (std::size_t i = from; i < others.size(); ++i) {
        pick.push_back(others[i]);
        self(self, i + 1);
        pick.pop_back();
      }
    };
    rec(rec, 0);
    std::sort(subsets.begin(), subsets.end());
    std::vector<std::pair<VertexSet, SubsetLabel>> entries;
    entries.reserve(subsets.size());
    for (auto& k : subsets) entries.emplace_back(k, hat_for(k));
    l.hat_map = std::move(entries);
  }
  return labels;
}

/// Decides whether the owners of `labels` form a Steiner cut, from the labels alone.
inline QueryAnswer query(std::span<const SchemeLabel* const> labels, QueryOptions options = {}) {
  if (labels.empty()) throw Error("query needs at least one fault label");
  const SchemeLabel& head = *labels.front();
  for (const SchemeLabel* l : labels)
    if (l->mode != head.mode || !(l->info == head.info))
      throw LabelMixError("labels come from different builds");
  if (labels.size() > head.info.f)
    throw Error("query has " + std::to_string(labels.size()) + " faults but f=" +
                std::to_string(head.info.f));

  VertexSet faults;
  for (const SchemeLabel* l : labels) faults.push_back(l->owner);
  faults = normalize(std::move(faults));
  if (faults.size() != labels.size()) throw Error("duplicate fault label");

  QueryAnswer ans;
  switch (head.mode) {
    case SchemeMode::NoTerminals:
      return ans;
    case SchemeMode::SingleBit:
      ans.yes = head.cut_bit;
      if (ans.yes) ans.separating_subset = faults;
      return ans;
    case SchemeMode::Full:
      break;
  }

  const VertexSet bad = head.bad_ids();
  for (const SchemeLabel* l : labels)
    if (l->bad_ids() != bad) throw LabelMixError("labels disagree on the high-degree set");

  // K := F n B; does K already separate U - F?
  VertexSet k;
  std::set_intersection(faults.begin(), faults.end(), bad.begin(), bad.end(), std::back_inserter(k));
  const SubsetLabel* hat = nullptr;
  if (k.empty()) {
    hat = &head.hat_empty;
  } else {
    for (const SchemeLabel* l : labels)
      if (l->owner == k.front()) hat = l->find_hat(k);
    if (!hat) throw LabelMixError("no subset label stored for F n B");
  }
  if (query_subset_label(*hat, std::span<const Vertex>(faults))) {
    ans.yes = true;
    ans.separating_subset = k;
    return ans;
  }

  // S: non-faulty vertices whose star label is stored in some fault label.
  std::map<Vertex, const StarLabel*> stored;
  auto collect = [&](const StarRef& s) {
    if (s && !set_contains(faults, s->vertex)) stored.emplace(s->vertex, s.get());
  };
  std::vector<const StLabel*> fault_st;
  std::vector<const ReachLabel*> fault_reach;
  for (const SchemeLabel* l : labels) {
    if (!l->star_self || l->star_self->vertex != l->owner) throw LabelMixError("label without its own entry");
    fault_st.push_back(&l->star_self->st);
    fault_reach.push_back(&l->star_self->reach);
    collect(l->star_ux);
    for (const auto& s : l->star_bad) collect(s);
    if (l->low_deg_neighbors)
      for (const auto& s : *l->low_deg_neighbors) collect(s);
  }

  // W: members of S reaching some terminal in G - F.
  std::vector<const StarLabel*> reach;
  for (const auto& [v, s] : stored)
    if (query_reach(s->reach, std::span<const ReachLabel* const>(fault_reach))) reach.push_back(s);
  if (reach.empty()) return ans;

  const StarLabel* anchor = options.largest_anchor ? reach.back() : reach.front();
  for (const StarLabel* w : reach) {
    if (w == anchor) continue;
    if (!query_st(std::span<const StLabel* const>(fault_st), anchor->st, w->st)) {
      ans.yes = true;
      ans.disconnected_pair = std::make_pair(anchor->vertex, w->vertex);
      return ans;
    }
  }
  return ans;
}

inline QueryAnswer query(std::span<const SchemeLabel> labels, QueryOptions options = {}) {
  std::vector<const SchemeLabel*> ptrs;
  for (const auto& l : labels) ptrs.push_back(&l);
  return query(std::span<const SchemeLabel* const>(ptrs), options);
}

/// Convenience: query the labels of the listed vertices.
inline QueryAnswer query_faults(const std::vector<SchemeLabel>& all, std::span<const Vertex> faults,
                                QueryOptions options = {}) {
  std::vector<const SchemeLabel*> ptrs;
  for (Vertex v : faults) ptrs.push_back(&all.at(v));
  return query(std::span<const SchemeLabel* const>(ptrs), options);
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

constexpr std::uint32_t kSchemeMagic = make_tag('F', 'T', 'S', 'L');
constexpr std::uint64_t kSchemeVersion = 1;

inline void write_info(ByteWriter& w, const BuildInfo& info) {
  w.varint(info.n);
  w.varint(info.f);
  w.varint(info.r);
  w.varint(info.terminals);
  w.u32(info.build_id);
}

inline BuildInfo read_info(ByteReader& in) {
  BuildInfo info;
  info.n = static_cast<std::size_t>(in.varint_below(std::uint64_t{1} << 32, "vertex count"));
  info.f = static_cast<std::size_t>(in.varint_below(std::uint64_t{1} << 16, "fault bound"));
  info.r = static_cast<std::size_t>(in.varint_below(std::uint64_t{1} << 32, "threshold"));
  info.terminals = static_cast<std::size_t>(in.varint_below(info.n + 1, "terminal count"));
  info.build_id = in.u32();
  return info;
}

/// Star entries are written once per label and referenced by index; identical
/// payload byte strings are written once as well.
class StarTable {
 public:
  std::size_t add(const StarRef& s) {
    for (std::size_t i = 0; i < stars_.size(); ++i)
      if (stars_[i] == s || *stars_[i] == *s) return i;
    stars_.push_back(s);
    return stars_.size() - 1;
  }

  void write(ByteWriter& w) const {
    std::vector<const Bytes*> blobs;
    auto blob_index = [&](const Bytes& b) {
      for (std::size_t i = 0; i < blobs.size(); ++i)
        if (*blobs[i] == b) return i;
      blobs.push_back(&b);
      return blobs.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> refs;
    for (const auto& s : stars_)
      refs.push_back({blob_index(s->st.payload), blob_index(s->reach.self.payload),
                      blob_index(s->reach.apex.payload)});
    w.varint(blobs.size());
    for (const Bytes* b : blobs) w.blob(*b);
    w.varint(stars_.size());
    for (std::size_t i = 0; i < stars_.size(); ++i) {
      w.varint(stars_[i]->vertex);
      for (auto r : refs[i]) w.varint(r);
    }
  }

  static std::vector<StarRef> read(ByteReader& in, std::size_t n) {
    const auto blob_count = in.varint_below(std::uint64_t{1} << 32, "blob count");
    std::vector<Bytes> blobs;
    for (std::uint64_t i = 0; i < blob_count; ++i) {
      auto b = in.blob();
      blobs.emplace_back(b.begin(), b.end());
    }
    const auto star_count = in.varint_below(std::uint64_t{1} << 32, "star count");
    std::vector<StarRef> stars;
    for (std::uint64_t i = 0; i < star_count; ++i) {
      StarLabel s;
      s.vertex = static_cast<Vertex>(in.varint_below(n, "star vertex"));
      const auto st = in.varint_below(blobs.size(), "blob index");
      const auto self = in.varint_below(blobs.size(), "blob index");
      const auto apex = in.varint_below(blobs.size(), "blob index");
      s.st = StLabel{s.vertex, blobs[st]};
      s.reach = ReachLabel{s.vertex, StLabel{s.vertex, blobs[self]}, StLabel{static_cast<Vertex>(n), blobs[apex]}};
      stars.push_back(std::make_shared<const StarLabel>(std::move(s)));
    }
    return stars;
  }

 private:
  std::vector<StarRef> stars_;
};

inline void write_vertex_list(ByteWriter& w, std::span<const Vertex> vs) {
  w.varint(vs.size());
  for (Vertex v : vs) w.varint(v);
}

inline VertexSet read_sorted_vertices(ByteReader& in, std::size_t n) {
  const auto count = in.varint_below(n + 1, "list length");
  VertexSet out(static_cast<std::size_t>(count));
  for (auto& v : out) v = static_cast<Vertex>(in.varint_below(n, "vertex id"));
  if (std::adjacent_find(out.begin(), out.end(), std::greater_equal<>()) != out.end())
    throw MalformedBits("vertex list not strictly increasing");
  return out;
}

inline void append_crc(ByteWriter& w) { w.u32(crc32(w.bytes())); }

inline std::span<const std::uint8_t> check_crc(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw MalformedBits("record shorter than its checksum");
  auto body = bytes.first(bytes.size() - 4);
  ByteReader tail(bytes.last(4));
  if (tail.u32() != crc32(body)) throw MalformedBits("checksum mismatch");
  return body;
}

}  // namespace detail

/// Self-describing record: magic, version, mode, owner, build info, then the
/// mode's payload, then a CRC-32 of everything before it.
inline Bytes serialize_label(const SchemeLabel& l) {
  ByteWriter w;
  w.u32(detail::kSchemeMagic);
  w.varint(detail::kSchemeVersion);
  w.byte(static_cast<std::uint8_t>(l.mode));
  w.varint(l.owner);
  detail::write_info(w, l.info);
  if (l.mode == SchemeMode::SingleBit) w.byte(l.cut_bit ? 1 : 0);
  if (l.mode == SchemeMode::Full) {
    detail::StarTable table;
    const auto self = table.add(l.star_self);
    const auto ux = l.star_ux ? table.add(l.star_ux) + 1 : 0;
    std::vector<std::size_t> bad;
    for (const auto& s : l.star_bad) bad.push_back(table.add(s));
    std::vector<std::size_t> nbrs;
    if (l.low_deg_neighbors)
      for (const auto& s : *l.low_deg_neighbors) nbrs.push_back(table.add(s));
    table.write(w);
    w.varint(self);
    w.varint(ux);
    w.varint(bad.size());
    for (auto i : bad) w.varint(i);
    write_bits(w, serialize_subset_label(l.hat_empty));
    if (l.low_deg_neighbors) {
      w.byte(0);
      w.varint(nbrs.size());
      for (auto i : nbrs) w.varint(i);
    } else {
      w.byte(1);
      w.varint(l.hat_map->size());
      for (const auto& [k, hat] : *l.hat_map) {
        detail::write_vertex_list(w, k);
        write_bits(w, serialize_subset_label(hat));
      }
    }
  }
  detail::append_crc(w);
  return w.take();
}

inline SchemeLabel deserialize_label(std::span<const std::uint8_t> bytes) {
  ByteReader in(detail::check_crc(bytes));
  if (in.u32() != detail::kSchemeMagic) throw MalformedBits("not a scheme label");
  if (in.varint() != detail::kSchemeVersion) throw MalformedBits("unsupported label version");
  SchemeLabel l;
  const auto mode = in.byte();
  if (mode > 2) throw MalformedBits("unknown label mode");
  l.mode = static_cast<SchemeMode>(mode);
  const auto owner = in.varint();
  l.info = detail::read_info(in);
  const std::size_t n = l.info.n;
  if (owner >= n) throw MalformedBits("owner outside the graph");
  l.owner = static_cast<Vertex>(owner);

  if (l.mode == SchemeMode::SingleBit) {
    const auto bit = in.byte();
    if (bit > 1) throw MalformedBits("bad cut bit");
    l.cut_bit = bit == 1;
  }
  if (l.mode == SchemeMode::Full) {
    if (l.info.f < 2) throw MalformedBits("full label with f < 2");
    auto stars = detail::StarTable::read(in, n);
    auto star_at = [&](std::uint64_t i) { return stars.at(static_cast<std::size_t>(i)); };
    l.star_self = star_at(in.varint_below(stars.size(), "star index"));
    if (l.star_self->vertex != l.owner) throw MalformedBits("own entry belongs to another vertex");
    if (auto ux = in.varint_below(stars.size() + 1, "star index"); ux > 0) l.star_ux = star_at(ux - 1);
    const auto bad_count = in.varint_below(stars.size() + 1, "bad count");
    for (std::uint64_t i = 0; i < bad_count; ++i)
      l.star_bad.push_back(star_at(in.varint_below(stars.size(), "star index")));
    const auto bad = l.bad_ids();
    if (std::adjacent_find(bad.begin(), bad.end(), std::greater_equal<>()) != bad.end())
      throw MalformedBits("high-degree entries not strictly increasing");
    l.hat_empty = deserialize_subset_label(read_bits(in), n, l.info.f);
    const auto section = in.byte();
    const bool owner_bad = set_contains(bad, l.owner);
    if (section == 0) {
      if (owner_bad) throw MalformedBits("high-degree owner with a low-degree section");
      const auto count = in.varint_below(stars.size() + 1, "neighbour count");
      std::vector<StarRef> nbrs;
      for (std::uint64_t i = 0; i < count; ++i) nbrs.push_back(star_at(in.varint_below(stars.size(), "star index")));
      l.low_deg_neighbors = std::move(nbrs);
    } else if (section == 1) {
      if (!owner_bad) throw MalformedBits("low-degree owner with a subset section");
      const auto count = in.varint_below(bytes.size() + 1, "subset count");
      std::vector<std::pair<VertexSet, SubsetLabel>> entries;
      for (std::uint64_t i = 0; i < count; ++i) {
        auto k = detail::read_sorted_vertices(in, n);
        if (k.empty() || k.size() > l.info.f || !set_contains(k, l.owner) ||
            !std::includes(bad.begin(), bad.end(), k.begin(), k.end()))
          throw MalformedBits("subset key is not a small subset of B containing the owner");
        if (!entries.empty() && !(entries.back().first < k)) throw MalformedBits("subset keys out of order");
        entries.emplace_back(std::move(k), deserialize_subset_label(read_bits(in), n, l.info.f));
      }
      l.hat_map = std::move(entries);
    } else {
      throw MalformedBits("unknown label section");
    }
  }
  in.expect_done();
  return l;
}

struct LabelStats {
  SchemeMode mode = SchemeMode::Full;
  std::size_t labels = 0;
  std::size_t f = 0;
  std::size_t r = 0;
  std::size_t bad = 0;
  std::size_t terminals = 0;
  std::size_t max_star_entries = 0;
  double mean_star_entries = 0;
  std::size_t max_hat_entries = 0;
  double mean_hat_entries = 0;
  /// Depends on the pairwise-label backend.
  std::size_t max_serialized_bits = 0;
  /// Information bits per label in single-bit mode (1), otherwise 0.
  std::size_t single_bit_payload = 0;
};

inline LabelStats label_stats(std::span<const SchemeLabel> labels, bool measure_bits = true) {
  LabelStats s;
  if (labels.empty()) return s;
  s.mode = labels.front().mode;
  s.labels = labels.size();
  s.f = labels.front().info.f;
  s.r = labels.front().info.r;
  s.terminals = labels.front().info.terminals;
  s.bad = labels.front().star_bad.size();
  s.single_bit_payload = s.mode == SchemeMode::SingleBit ? 1 : 0;
  double star_sum = 0;
  double hat_sum = 0;
  for (const auto& l : labels) {
    if (!(l.info == labels.front().info)) throw LabelMixError("labels come from different builds");
    s.max_star_entries = std::max(s.max_star_entries, l.star_entries());
    s.max_hat_entries = std::max(s.max_hat_entries, l.hat_entries());
    star_sum += static_cast<double>(l.star_entries());
    hat_sum += static_cast<double>(l.hat_entries());
    if (measure_bits) s.max_serialized_bits = std::max(s.max_serialized_bits, 8 * serialize_label(l).size());
  }
  s.mean_star_entries = star_sum / static_cast<double>(labels.size());
  s.mean_hat_entries = hat_sum / static_cast<double>(labels.size());
  return s;
}

}  // namespace ftsc
