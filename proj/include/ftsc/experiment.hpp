#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ftsc/errors.hpp"
#include "ftsc/graph.hpp"
#include "ftsc/scheme.hpp"
#include "ftsc/warmup.hpp"

namespace ftsc {

enum class Family { Gnp, Grid, Star, Tree, File };
enum class TerminalRule { All, RandomK, Leaves };
enum class SchemeKind { Main, Warmup };

inline Family parse_family(const std::string& s) {
  static const std::map<std::string, Family> names{
      {"gnp", Family::Gnp}, {"grid", Family::Grid}, {"star", Family::Star}, {"tree", Family::Tree}, {"file", Family::File}};
  auto it = names.find(s);
  if (it == names.end()) throw Error("unknown graph family '" + s + "'");
  return it->second;
}

inline TerminalRule parse_terminal_rule(const std::string& s) {
  if (s == "all") return TerminalRule::All;
  if (s == "random-k") return TerminalRule::RandomK;
  if (s == "leaves") return TerminalRule::Leaves;
  throw Error("unknown terminal rule '" + s + "'");
}

inline SchemeKind parse_scheme_kind(const std::string& s) {
  if (s == "main") return SchemeKind::Main;
  if (s == "warmup") return SchemeKind::Warmup;
  throw Error("unknown scheme '" + s + "'");
}

inline std::string to_string(SchemeKind k) { return k == SchemeKind::Main ? "main" : "warmup"; }

struct ExperimentConfig {
  Family family = Family::Gnp;
  std::size_t n = 0;
  /// Edge probability for gnp; negative selects 2 ln(n) / n.
  double p = -1;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string path;
  TerminalRule terminals = TerminalRule::All;
  std::size_t k = 0;
  std::size_t f = 2;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 1;
};

/// Draws with explicit arithmetic on the engine output so instances are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline VertexSet pick_terminals(const Graph& g, const ExperimentConfig& cfg, Rng& rng) {
  const std::size_t n = g.num_vertices();
  VertexSet out;
  switch (cfg.terminals) {
    case TerminalRule::All:
      out.resize(n);
      std::iota(out.begin(), out.end(), Vertex{0});
      break;
    case TerminalRule::Leaves:
      for (Vertex v = 0; v < n; ++v)
        if (g.degree(v) == 1) out.push_back(v);
      break;
    case TerminalRule::RandomK: {
      if (cfg.k > n) throw Error("terminal count k exceeds n");
      VertexSet perm(n);
      std::iota(perm.begin(), perm.end(), Vertex{0});
      for (std::size_t i = 0; i < cfg.k; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
      out.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cfg.k));
      break;
    }
  }
  return normalize(std::move(out));
}

inline Graph random_graph(const ExperimentConfig& cfg, Rng& rng) {
  switch (cfg.family) {
    case Family::Gnp: {
      const double p = cfg.p >= 0 ? cfg.p
                                  : (cfg.n > 1 ? std::min(1.0, 2.0 * std::log(static_cast<double>(cfg.n)) / static_cast<double>(cfg.n)) : 0.0);
      std::vector<Edge> edges;
      for (Vertex a = 0; a < cfg.n; ++a)
        for (Vertex b = a + 1; b < cfg.n; ++b)
          if (rng.uniform() < p) edges.push_back(Edge{a, b});
      return Graph(cfg.n, std::move(edges));
    }
    case Family::Grid: {
      std::vector<Edge> edges;
      auto id = [&](std::size_t r, std::size_t c) { return static_cast<Vertex>(r * cfg.cols + c); };
      for (std::size_t r = 0; r < cfg.rows; ++r)
        for (std::size_t c = 0; c < cfg.cols; ++c) {
          if (c + 1 < cfg.cols) edges.push_back(Edge{id(r, c), id(r, c + 1)});
          if (r + 1 < cfg.rows) edges.push_back(Edge{id(r, c), id(r + 1, c)});
        }
      return Graph(cfg.rows * cfg.cols, std::move(edges));
    }
    case Family::Star: {
      std::vector<Edge> edges;
      for (Vertex v = 1; v < cfg.n; ++v) edges.push_back(Edge{0, v});
      return Graph(cfg.n, std::move(edges));
    }
    case Family::Tree: {
      // Random labelled tree from a random Pruefer sequence.
      const std::size_t n = cfg.n;
      if (n <= 1) return Graph(n, {});
      if (n == 2) return Graph(2, {Edge{0, 1}});
      std::vector<Vertex> code(n - 2);
      for (auto& c : code) c = static_cast<Vertex>(rng.below(n));
      std::vector<std::size_t> degree(n, 1);
      for (Vertex c : code) ++degree[c];
      std::vector<Edge> edges;
      for (Vertex c : code) {
        Vertex leaf = 0;
        while (degree[leaf] != 1) ++leaf;
        edges.push_back(Edge::make(leaf, c));
        --degree[leaf];
        --degree[c];
      }
      VertexSet last;
      for (Vertex v = 0; v < n; ++v)
        if (degree[v] == 1) last.push_back(v);
      edges.push_back(Edge::make(last[0], last[1]));
      return Graph(n, std::move(edges));
    }
    case Family::File: {
      std::ifstream in(cfg.path);
      if (!in) throw Error("cannot open graph file '" + cfg.path + "'");
      return parse_instance(in).graph;
    }
  }
  throw Error("unhandled graph family");
}

}  // namespace detail

/// Deterministic given the configuration and seed.
inline Instance gen_instance(const ExperimentConfig& cfg) {
  const bool random_family = cfg.family == Family::Gnp || cfg.family == Family::Tree;
  if ((random_family || cfg.terminals == TerminalRule::RandomK) && !cfg.seed)
    throw Error("a seed is required for random families and random terminals");
  if (cfg.family == Family::Grid && (cfg.rows == 0 || cfg.cols == 0)) throw Error("grid needs rows and cols");
  if (cfg.family == Family::Gnp && cfg.p > 1) throw Error("edge probability above 1");
  Rng rng(cfg.seed.value_or(0));
  if (cfg.family == Family::File) {
    std::ifstream in(cfg.path);
    if (!in) throw Error("cannot open graph file '" + cfg.path + "'");
    Instance inst = parse_instance(in);
    if (cfg.terminals != TerminalRule::All || inst.terminals.size() == 0) {
      auto u = detail::pick_terminals(inst.graph, cfg, rng);
      inst.terminals = TerminalSet(u, inst.graph.num_vertices());
    }
    return inst;
  }
  constexpr int kRetries = 100;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    Graph g = detail::random_graph(cfg, rng);
    auto u = detail::pick_terminals(g, cfg, rng);
    if (u.size() >= 2 || cfg.family != Family::Gnp) {
      const auto n = g.num_vertices();
      return Instance{std::move(g), TerminalSet(u, n)};
    }
  }
  throw GenerationFailed("no instance with at least two terminals after " + std::to_string(kRetries) + " draws");
}

struct BenchRow {
  std::size_t terminals = 0;
  std::size_t rep = 0;
  SchemeKind scheme = SchemeKind::Main;
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t bad = 0;
  std::size_t max_entries = 0;
  double mean_entries = 0;
  std::size_t max_bits = 0;
  std::string error;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Least-squares slope of log(max entries) against log |U|; counts below 1 are taken as 1.
  double exponent = 0;
  std::map<std::size_t, double> median_max_entries;
};

inline double least_squares_slope(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) return 0;
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / static_cast<double>(pts.size());
  const double my = sy / static_cast<double>(pts.size());
  double num = 0, den = 0;
  for (const auto& [x, y] : pts) {
    num += (x - mx) * (y - my);
    den += (x - mx) * (x - mx);
  }
  return den == 0 ? 0 : num / den;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
}

struct BenchOptions {
  /// Vertices per terminal when the base config does not fix n.
  std::size_t n_per_terminal = 2;
  std::size_t threads = 1;
  bool measure_bits = true;
};

inline BenchRow bench_one(const ExperimentConfig& cfg, SchemeKind scheme, std::size_t rep, bool measure_bits) {
  BenchRow row;
  row.rep = rep;
  row.scheme = scheme;
  row.terminals = cfg.k;
  try {
    const Instance inst = gen_instance(cfg);
    row.n = inst.graph.num_vertices();
    row.terminals = inst.terminals.size();
    if (scheme == SchemeKind::Main) {
      const auto labels = build_labels(inst.graph, inst.terminals, cfg.f);
      const auto stats = label_stats(labels, measure_bits);
      row.r = stats.r;
      row.bad = stats.bad;
      row.max_entries = stats.max_star_entries;
      row.mean_entries = stats.mean_star_entries;
      row.max_bits = stats.max_serialized_bits;
    } else {
      const auto labels = build_warmup_labels(inst.graph, inst.terminals, cfg.f);
      double sum = 0;
      for (Vertex v = 0; v < labels.size(); ++v) {
        const auto entries = labels[v]->star_entries();
        row.max_entries = std::max(row.max_entries, entries);
        sum += static_cast<double>(entries);
        if (measure_bits)
          row.max_bits = std::max(row.max_bits, 8 * serialize_warmup_label(*labels[v], row.n, cfg.f).size());
      }
      row.mean_entries = labels.empty() ? 0 : sum / static_cast<double>(labels.size());
      row.r = cfg.f >= 2 ? warmup_threshold(cfg.f, row.terminals) : 0;
    }
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

/// Seed of repetition `rep` at terminal count `k`.
inline std::uint64_t bench_seed(std::uint64_t base, std::size_t k, std::size_t rep) {
  return base * 1'000'003ULL + k * 7919ULL + rep;
}

inline BenchResult run_scaling_bench(const ExperimentConfig& base, const std::vector<std::size_t>& u_sizes,
                                     std::size_t f, std::size_t reps, SchemeKind scheme = SchemeKind::Main,
                                     BenchOptions options = {}) {
  if (u_sizes.size() < 3) throw Error("scaling bench needs at least three terminal counts");
  if (!std::is_sorted(u_sizes.begin(), u_sizes.end())) throw Error("terminal counts must be ascending");
  struct Job {
    ExperimentConfig cfg;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t k : u_sizes)
    for (std::size_t rep = 0; rep < reps; ++rep) {
      ExperimentConfig cfg = base;
      cfg.f = f;
      cfg.k = k;
      cfg.terminals = TerminalRule::RandomK;
      if (cfg.family == Family::Gnp || cfg.family == Family::Tree || cfg.family == Family::Star)
        cfg.n = std::max(k, options.n_per_terminal * k);
      cfg.seed = bench_seed(base.seed.value_or(0), k, rep);
      jobs.push_back({cfg, rep});
    }
  BenchResult result;
  result.rows.resize(jobs.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, jobs.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < jobs.size();)
      result.rows[i] = bench_one(jobs[i].cfg, scheme, jobs[i].rep, options.measure_bits);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<std::pair<double, double>> pts;
  std::map<std::size_t, std::vector<double>> per_k;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) continue;
    const auto k = jobs[static_cast<std::size_t>(&row - result.rows.data())].cfg.k;
    pts.emplace_back(std::log(static_cast<double>(k)), std::log(static_cast<double>(std::max<std::size_t>(1, row.max_entries))));
    per_k[k].push_back(static_cast<double>(row.max_entries));
  }
  result.exponent = least_squares_slope(pts);
  for (auto& [k, v] : per_k) result.median_max_entries[k] = median(v);
  return result;
}

inline constexpr const char* kBenchCsvHeader = "terminals,rep,scheme,n,r,bad,max_entries,mean_entries,max_bits,error";

}  // namespace ftsc
