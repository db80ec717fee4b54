#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ftsc/bits.hpp"
#include "ftsc/graph.hpp"

namespace ftsc {

/// Summary of how the terminals are spread over the components of G - K,
/// enough to decide for any |F| <= f whether K separates U - F.
struct SubsetLabel {
  enum class Kind : std::uint8_t {
    /// Every terminal group is small and all of them are stored (at most 3f terminals).
    SmallAll = 0,
    /// The largest group has more than f terminals; the others (at most f in total) are stored.
    BigLast = 1,
    /// The groups split into two halves of more than f terminals each.
    AlwaysYes = 2,
  };

  Kind kind = Kind::SmallAll;
  /// Sorted by size ascending, ties by smallest member.
  std::vector<VertexSet> groups;
  std::size_t n = 0;
  std::size_t f = 0;

  std::size_t stored_terminals() const {
    std::size_t total = 0;
    for (const auto& g : groups) total += g.size();
    return total;
  }

  friend bool operator==(const SubsetLabel&, const SubsetLabel&) = default;
};

namespace detail {

/// Terminal-bearing components of g - K, as sorted terminal lists ordered by (size, first id).
inline std::vector<VertexSet> terminal_groups(const Graph& g, const TerminalSet& u,
                                              std::span<const Vertex> k_set) {
  auto comps = components(g, k_set);
  std::vector<VertexSet> by_comp(comps.count);
  for (Vertex t : u)
    if (comps.id[t] >= 0) by_comp[static_cast<std::size_t>(comps.id[t])].push_back(t);
  std::vector<VertexSet> groups;
  for (auto& grp : by_comp)
    if (!grp.empty()) groups.push_back(std::move(grp));
  std::sort(groups.begin(), groups.end(), [](const VertexSet& a, const VertexSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a.front() < b.front();
  });
  return groups;
}

inline bool survives(const VertexSet& group, std::span<const Vertex> faults) {
  return std::any_of(group.begin(), group.end(),
                     [&](Vertex v) { return !set_contains(faults, v); });
}

}  // namespace detail

inline SubsetLabel build_subset_label(const Graph& g, const TerminalSet& u,
                                      std::span<const Vertex> k_set, std::size_t f) {
  if (f == 0) throw Error("subset labels need f >= 1");
  auto groups = detail::terminal_groups(g, u, k_set);
  SubsetLabel label;
  label.n = g.num_vertices();
  label.f = f;

  const std::size_t p = groups.size();
  const std::size_t total =
      std::accumulate(groups.begin(), groups.end(), std::size_t{0},
                      [](std::size_t acc, const VertexSet& grp) { return acc + grp.size(); });
  std::size_t prefix = 0;
  for (std::size_t q = 0; q + 1 < p; ++q) {
    prefix += groups[q].size();
    if (prefix > f && total - prefix > f) {
      label.kind = SubsetLabel::Kind::AlwaysYes;
      return label;
    }
  }

  if (p > 0 && groups.back().size() > f) {
    groups.pop_back();
    label.kind = SubsetLabel::Kind::BigLast;
    label.groups = std::move(groups);
    if (label.stored_terminals() > f)
      throw InternalBoundViolated("big-last subset label stores more than f terminals");
    return label;
  }

  label.kind = SubsetLabel::Kind::SmallAll;
  label.groups = std::move(groups);
  if (label.stored_terminals() > 3 * f)
    throw InternalBoundViolated("small subset label stores more than 3f terminals");
  return label;
}

/// Does K separate U - F? `faults` must be sorted.
inline bool query_subset_label(const SubsetLabel& label, std::span<const Vertex> faults) {
  switch (label.kind) {
    case SubsetLabel::Kind::AlwaysYes:
      return true;
    case SubsetLabel::Kind::BigLast:
      // The unstored largest group always has a survivor.
      return std::any_of(label.groups.begin(), label.groups.end(),
                         [&](const VertexSet& grp) { return detail::survives(grp, faults); });
    case SubsetLabel::Kind::SmallAll: {
      std::size_t alive = 0;
      for (const auto& grp : label.groups)
        if (detail::survives(grp, faults) && ++alive >= 2) return true;
      return false;
    }
  }
  return false;
}

inline bool query_subset_label(const SubsetLabel& label, VertexSet faults) {
  faults = normalize(std::move(faults));
  return query_subset_label(label, std::span<const Vertex>(faults));
}

/// Field widths of the bit format: terminal ids take ceil(log2 n) bits, group sizes
/// take ceil(log2(min(f, n) + 1)) bits.
struct SubsetLabelWidths {
  unsigned id;
  unsigned size;

  static SubsetLabelWidths of(std::size_t n, std::size_t f) {
    return {bits_for(n), bits_for(std::min(f, n) + 1)};
  }
};

/// 2-bit kind tag, then per stored group its size and its member ids. The group
/// count is implied by the bit length.
inline BitString serialize_subset_label(const SubsetLabel& label) {
  const auto w = SubsetLabelWidths::of(label.n, label.f);
  BitString bits;
  bits.push(static_cast<std::uint64_t>(label.kind), 2);
  for (const auto& grp : label.groups) {
    bits.push(grp.size(), w.size);
    for (Vertex v : grp) bits.push(v, w.id);
  }
  return bits;
}

inline SubsetLabel deserialize_subset_label(const BitString& bits, std::size_t n, std::size_t f) {
  if (f == 0) throw MalformedBits("subset label with f = 0");
  const auto w = SubsetLabelWidths::of(n, f);
  BitReader in(bits);
  SubsetLabel label;
  label.n = n;
  label.f = f;
  auto tag = in.read(2);
  if (tag > 2) throw MalformedBits("unknown subset label tag");
  label.kind = static_cast<SubsetLabel::Kind>(tag);
  while (in.remaining() > 0) {
    auto size = in.read(w.size);
    if (size == 0 || size > std::min(f, n)) throw MalformedBits("bad group size");
    VertexSet grp(size);
    for (auto& v : grp) {
      v = static_cast<Vertex>(in.read(w.id));
      if (v >= n) throw MalformedBits("terminal id out of range");
    }
    if (!std::is_sorted(grp.begin(), grp.end()) ||
        std::adjacent_find(grp.begin(), grp.end()) != grp.end())
      throw MalformedBits("group members not strictly increasing");
    label.groups.push_back(std::move(grp));
  }
  if (label.kind == SubsetLabel::Kind::AlwaysYes && !label.groups.empty())
    throw MalformedBits("always-yes label carries groups");
  const std::size_t cap = label.kind == SubsetLabel::Kind::BigLast ? f : 3 * f;
  if (label.stored_terminals() > cap) throw MalformedBits("subset label exceeds its terminal bound");
  return label;
}

/// The simple O(f^2 log n)-bit alternative: up to f+1 groups, up to f+1 terminals of each.
struct SimpleSubsetLabel {
  std::vector<VertexSet> groups;
  /// Whether some terminal-bearing component was left out.
  bool more_groups = false;
  std::size_t f = 0;
};

inline SimpleSubsetLabel build_simple_subset_label(const Graph& g, const TerminalSet& u,
                                                   std::span<const Vertex> k_set, std::size_t f) {
  auto groups = detail::terminal_groups(g, u, k_set);
  SimpleSubsetLabel label;
  label.f = f;
  label.more_groups = groups.size() > f + 1;
  if (label.more_groups) groups.resize(f + 1);
  for (auto& grp : groups)
    if (grp.size() > f + 1) grp.resize(f + 1);
  label.groups = std::move(groups);
  return label;
}

/// A stored group is killed only by spending one fault per stored member, so when
/// f+1 groups are stored and only one survives, F is used up and every left-out group lives.
inline bool query_simple_subset_label(const SimpleSubsetLabel& label, std::span<const Vertex> faults) {
  std::size_t alive = 0;
  for (const auto& grp : label.groups)
    if (detail::survives(grp, faults)) ++alive;
  if (alive >= 2) return true;
  return alive == 1 && label.more_groups;
}

}  // namespace ftsc
