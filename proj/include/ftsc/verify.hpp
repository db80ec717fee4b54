#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ftsc/errors.hpp"
#include "ftsc/experiment.hpp"
#include "ftsc/graph.hpp"
#include "ftsc/scheme.hpp"
#include "ftsc/warmup.hpp"

namespace ftsc {

struct Mismatch {
  VertexSet faults;
  bool scheme = false;
  bool oracle = false;
};

struct VerifyReport {
  std::string descriptor;
  std::size_t queries = 0;
  bool sampled = false;
  std::optional<std::uint64_t> seed;
  std::vector<Mismatch> mismatches;
  bool pass = true;
};

struct VerifyOptions {
  /// Largest number of fault sets checked exhaustively.
  std::uint64_t budget = 2'000'000;
  /// Fall back to sampling above the budget; otherwise throw BudgetExceeded.
  bool allow_sampling = true;
  std::size_t samples = 10'000;
  std::uint64_t seed = 0;
};

/// Number of fault sets F with 1 <= |F| <= f, saturating at 2^64 - 1.
inline std::uint64_t count_fault_sets(std::size_t n, std::size_t f) {
  std::uint64_t total = 0;
  long double binom = 1;
  for (std::size_t s = 1; s <= std::min(f, n); ++s) {
    binom = binom * static_cast<long double>(n - s + 1) / static_cast<long double>(s);
    if (binom + static_cast<long double>(total) > 1.8e19L) return UINT64_MAX;
    total += static_cast<std::uint64_t>(std::llround(binom));
  }
  return total;
}

/// Visits every F with 1 <= |F| <= f in size-then-lexicographic order.
inline void for_each_fault_set(std::size_t n, std::size_t f, const std::function<void(std::span<const Vertex>)>& visit) {
  VertexSet pick;
  for (std::size_t size = 1; size <= std::min(f, n); ++size) {
    pick.resize(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = static_cast<Vertex>(i);
    while (true) {
      visit(pick);
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
}

/// Uniform samples over all F with 1 <= |F| <= f, sorted for determinism.
inline std::vector<VertexSet> sample_fault_sets(std::size_t n, std::size_t f, std::size_t count, std::uint64_t seed) {
  std::vector<double> weights;
  long double binom = 1;
  for (std::size_t s = 1; s <= std::min(f, n); ++s) {
    binom = binom * static_cast<long double>(n - s + 1) / static_cast<long double>(s);
    weights.push_back(static_cast<double>(binom));
  }
  Rng rng(seed);
  double total = 0;
  for (double w : weights) total += w;
  std::vector<VertexSet> out;
  VertexSet perm(n);
  for (std::size_t i = 0; i < count; ++i) {
    double x = rng.uniform() * total;
    std::size_t size = 1;
    for (; size < weights.size() && x >= weights[size - 1]; ++size) x -= weights[size - 1];
    std::iota(perm.begin(), perm.end(), Vertex{0});
    for (std::size_t j = 0; j < size; ++j) std::swap(perm[j], perm[j + rng.below(n - j)]);
    out.push_back(normalize(VertexSet(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size))));
  }
  std::sort(out.begin(), out.end());
  return out;
}

using FaultAnswer = std::function<bool(std::span<const Vertex>)>;

/// Compares `answer` with is_steiner_cut on every F (or a seeded sample above the budget).
inline VerifyReport verify_answers(const Graph& g, const TerminalSet& u, std::size_t f, const FaultAnswer& answer,
                                   VerifyOptions options = {}) {
  VerifyReport report;
  report.descriptor = "n=" + std::to_string(g.num_vertices()) + " m=" + std::to_string(g.num_edges()) +
                      " terminals=" + std::to_string(u.size()) + " f=" + std::to_string(f);
  auto check = [&](std::span<const Vertex> faults) {
    ++report.queries;
    const bool got = answer(faults);
    const bool want = is_steiner_cut(g, u, faults);
    if (got != want) report.mismatches.push_back({VertexSet(faults.begin(), faults.end()), got, want});
  };
  const auto total = count_fault_sets(g.num_vertices(), f);
  if (total <= options.budget) {
    for_each_fault_set(g.num_vertices(), f, check);
  } else {
    if (!options.allow_sampling)
      throw BudgetExceeded("exhaustive verification needs " + std::to_string(total) + " queries");
    report.sampled = true;
    report.seed = options.seed;
    for (const auto& faults : sample_fault_sets(g.num_vertices(), f, options.samples, options.seed)) check(faults);
  }
  report.pass = report.mismatches.empty();
  return report;
}

/// Builds the chosen scheme once, then checks it against the oracle.
inline VerifyReport exhaustive_verify(const Graph& g, const TerminalSet& u, std::size_t f, SchemeKind scheme,
                                      VerifyOptions options = {}) {
  if (scheme == SchemeKind::Main) {
    const auto labels = build_labels(g, u, f);
    auto report = verify_answers(g, u, f, [&](std::span<const Vertex> faults) { return query_faults(labels, faults).yes; },
                                 options);
    report.descriptor += " scheme=main";
    return report;
  }
  const auto labels = build_warmup_labels(g, u, f);
  auto report = verify_answers(g, u, f, [&](std::span<const Vertex> faults) { return query_warmup_faults(labels, faults); },
                               options);
  report.descriptor += " scheme=warmup";
  return report;
}

/// Brute force with vertex and edge deletions applied directly to g.
inline bool is_mixed_steiner_cut(const Graph& g, const TerminalSet& u, std::span<const Vertex> vertices,
                                 std::span<const Edge> edges) {
  std::vector<Edge> kept;
  for (const auto& e : g.edges())
    if (std::find(edges.begin(), edges.end(), e) == edges.end()) kept.push_back(e);
  return is_steiner_cut(Graph(g.num_vertices(), std::move(kept)), u, vertices);
}

}  // namespace ftsc
