#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftsc/decomp.hpp"
#include "ftsc/experiment.hpp"
#include "ftsc/graph.hpp"
#include "ftsc/label_file.hpp"
#include "ftsc/scheme.hpp"
#include "ftsc/verify.hpp"
#include "ftsc/warmup.hpp"

using json = nlohmann::ordered_json;
using namespace ftsc;

namespace {

constexpr int kPass = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  bool json = false;
  std::size_t threads = 1;
};

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path + "'");
  return parse_instance(in);
}

json vertex_list(std::span<const Vertex> vs) { return json(std::vector<Vertex>(vs.begin(), vs.end())); }

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

json report_json(const VerifyReport& r) {
  json mism = json::array();
  for (const auto& m : r.mismatches)
    mism.push_back({{"faults", vertex_list(m.faults)}, {"scheme", m.scheme}, {"oracle", m.oracle}});
  json j{{"instance", r.descriptor}, {"queries", r.queries}, {"sampled", r.sampled}};
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  j["mismatches"] = mism;
  j["pass"] = r.pass;
  return j;
}

json bench_json(const BenchResult& result, std::size_t f, SchemeKind scheme) {
  json rows = json::array();
  for (const auto& row : result.rows) {
    json j{{"terminals", row.terminals}, {"rep", row.rep},         {"scheme", to_string(row.scheme)},
           {"n", row.n},                 {"r", row.r},             {"bad", row.bad},
           {"max_entries", row.max_entries}, {"mean_entries", row.mean_entries}, {"max_bits", row.max_bits}};
    j["error"] = row.error.empty() ? json(nullptr) : json(row.error);
    rows.push_back(j);
  }
  json medians = json::array();
  for (const auto& [k, m] : result.median_max_entries) medians.push_back({{"terminals", k}, {"median_max_entries", m}});
  return {{"scheme", to_string(scheme)}, {"f", f}, {"fitted_exponent", result.exponent},
          {"medians", medians}, {"bits_backend_dependent", true}, {"rows", rows}};
}

std::string bench_csv(const BenchResult& result) {
  std::ostringstream out;
  out << kBenchCsvHeader << '\n';
  for (const auto& r : result.rows)
    out << r.terminals << ',' << r.rep << ',' << to_string(r.scheme) << ',' << r.n << ',' << r.r << ',' << r.bad << ','
        << r.max_entries << ',' << r.mean_entries << ',' << r.max_bits << ',' << r.error << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-tolerant Steiner connectivity labels"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_option("--seed", globals.seed, "Random seed (required for random instances)");
  app.add_flag("--json", globals.json, "Emit JSON");
  app.add_option("--threads", globals.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance in the graph text format");
  std::string family = "gnp", rule = "all", gen_out, gen_file;
  ExperimentConfig gen_cfg;
  gen->add_option("--family", family, "gnp|grid|star|tree|file")
      ->check(CLI::IsMember({"gnp", "grid", "star", "tree", "file"}))
      ->capture_default_str();
  gen->add_option("--n", gen_cfg.n, "Vertex count");
  gen->add_option("--p", gen_cfg.p, "Edge probability (default 2 ln n / n)");
  gen->add_option("--rows", gen_cfg.rows);
  gen->add_option("--cols", gen_cfg.cols);
  gen->add_option("--file", gen_file, "Input graph for the file family")->check(CLI::ExistingFile);
  gen->add_option("--terminals", rule, "all|random-k|leaves")
      ->check(CLI::IsMember({"all", "random-k", "leaves"}))
      ->capture_default_str();
  gen->add_option("--k", gen_cfg.k, "Terminal count for random-k");
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  // build
  auto* build = app.add_subcommand("build", "Build labels for every vertex");
  std::string build_graph, build_out, build_scheme = "main";
  std::size_t build_f = 2;
  build->add_option("--graph", build_graph)->required()->check(CLI::ExistingFile);
  build->add_option("--f", build_f)->required()->check(CLI::PositiveNumber);
  build->add_option("--out", build_out)->required();
  build->add_option("--scheme", build_scheme, "main|warmup")->check(CLI::IsMember({"main", "warmup"}))->capture_default_str();

  // query
  auto* query_cmd = app.add_subcommand("query", "Decide a fault set from its labels");
  std::string query_labels;
  std::vector<Vertex> query_faults_list;
  query_cmd->add_option("--labels", query_labels)->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--faults", query_faults_list, "Comma-separated vertex ids")->required()->delimiter(',');

  // stats
  auto* stats = app.add_subcommand("stats", "Label size statistics");
  std::string stats_labels;
  stats->add_option("--labels", stats_labels)->required()->check(CLI::ExistingFile);

  // verify
  auto* verify = app.add_subcommand("verify", "Compare the scheme with brute force");
  std::string verify_graph, verify_scheme = "main";
  std::size_t verify_f = 2;
  VerifyOptions verify_opts;
  verify->add_option("--graph", verify_graph)->required()->check(CLI::ExistingFile);
  verify->add_option("--f", verify_f)->required()->check(CLI::PositiveNumber);
  verify->add_option("--scheme", verify_scheme, "main|warmup")->check(CLI::IsMember({"main", "warmup"}))->capture_default_str();
  verify->add_option("--budget", verify_opts.budget, "Exhaustive query budget")->capture_default_str();
  verify->add_option("--samples", verify_opts.samples, "Samples above the budget")->capture_default_str();

  // decomp
  auto* decomp_cmd = app.add_subcommand("decomp", "Steiner forest with high-degree set");
  std::string decomp_graph;
  std::size_t decomp_r = 3;
  decomp_cmd->add_option("--graph", decomp_graph)->required()->check(CLI::ExistingFile);
  decomp_cmd->add_option("--r", decomp_r)->required()->check(CLI::Range(std::size_t{3}, std::size_t{1} << 30));

  // bench
  auto* bench = app.add_subcommand("bench", "Entry-count scaling over terminal counts");
  std::string bench_family = "gnp", bench_scheme = "main", bench_csv_path;
  std::vector<std::size_t> u_sizes{16, 64, 256};
  std::size_t bench_f = 2, reps = 10, per_terminal = 2;
  double bench_p = -1;
  bool no_bits = false;
  bench->add_option("--family", bench_family, "gnp|tree|star")->check(CLI::IsMember({"gnp", "tree", "star"}))->capture_default_str();
  bench->add_option("--p", bench_p, "Edge probability (default 2 ln n / n)");
  bench->add_option("--u-sizes", u_sizes, "Ascending terminal counts")->delimiter(',')->capture_default_str();
  bench->add_option("--f", bench_f)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--reps", reps)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--n-per-terminal", per_terminal)->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--scheme", bench_scheme, "main|warmup")->check(CLI::IsMember({"main", "warmup"}))->capture_default_str();
  bench->add_option("--csv", bench_csv_path, "Also write CSV rows here");
  bench->add_flag("--no-bits", no_bits, "Skip serialized-size measurement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*gen) {
      gen_cfg.family = parse_family(family);
      gen_cfg.terminals = parse_terminal_rule(rule);
      gen_cfg.path = gen_file;
      gen_cfg.seed = globals.seed;
      const Instance inst = gen_instance(gen_cfg);
      if (gen_out.empty()) {
        write_instance(std::cout, inst);
      } else {
        std::ofstream out(gen_out);
        if (!out) throw Error("cannot write '" + gen_out + "'");
        write_instance(out, inst);
        json j{{"out", gen_out},
               {"n", inst.graph.num_vertices()},
               {"m", inst.graph.num_edges()},
               {"terminals", inst.terminals.size()}};
        emit(globals, j, "wrote " + gen_out + "\n");
      }
      return kPass;
    }

    if (*build) {
      const Instance inst = load_instance(build_graph);
      const auto scheme = parse_scheme_kind(build_scheme);
      json j{{"scheme", build_scheme}, {"n", inst.graph.num_vertices()}, {"f", build_f}, {"out", build_out}};
      if (scheme == SchemeKind::Main) {
        const auto labels = build_labels(inst.graph, inst.terminals, build_f);
        write_label_file(build_out, labels);
        const auto s = label_stats(labels, false);
        j["r"] = s.r;
        j["bad"] = s.bad;
        j["max_star_entries"] = s.max_star_entries;
      } else {
        const auto labels = build_warmup_labels(inst.graph, inst.terminals, build_f);
        write_warmup_label_file(build_out, labels, build_f);
      }
      emit(globals, j, "wrote " + std::to_string(inst.graph.num_vertices()) + " labels to " + build_out + "\n");
      return kPass;
    }

    if (*query_cmd) {
      LabelFileReader reader(query_labels);
      json j{{"faults", vertex_list(query_faults_list)}};
      bool yes = false;
      if (reader.scheme() == SchemeKind::Main) {
        std::vector<SchemeLabel> labels;
        for (Vertex v : query_faults_list) {
          labels.push_back(deserialize_label(reader.record(v)));
          if (labels.back().owner != v) throw MalformedBits("record for vertex " + std::to_string(v) + " has another owner");
        }
        const auto ans = query(std::span<const SchemeLabel>(labels));
        yes = ans.yes;
        if (ans.disconnected_pair)
          j["disconnected_pair"] = {ans.disconnected_pair->first, ans.disconnected_pair->second};
        if (ans.separating_subset) j["separating_subset"] = vertex_list(*ans.separating_subset);
      } else {
        std::vector<WarmupRef> labels;
        std::vector<const WarmupLabel*> ptrs;
        for (Vertex v : query_faults_list) {
          labels.push_back(deserialize_warmup_label(reader.record(v)));
          if (labels.back()->owner != v) throw MalformedBits("record for vertex " + std::to_string(v) + " has another owner");
          ptrs.push_back(labels.back().get());
        }
        yes = query_warmup(std::span<const WarmupLabel* const>(ptrs));
      }
      j["steiner_cut"] = yes;
      emit(globals, j, std::string(yes ? "YES" : "NO") + "\n");
      return kPass;
    }

    if (*stats) {
      LabelFileReader reader(stats_labels);
      json j;
      std::ostringstream text;
      if (reader.scheme() == SchemeKind::Main) {
        std::vector<SchemeLabel> labels;
        std::size_t max_bits = 0;
        for (Vertex v = 0; v < reader.size(); ++v) {
          auto bytes = reader.record(v);
          max_bits = std::max(max_bits, 8 * bytes.size());
          labels.push_back(deserialize_label(bytes));
        }
        const auto s = label_stats(labels, false);
        j = {{"scheme", "main"},
             {"labels", s.labels},
             {"f", s.f},
             {"terminals", s.terminals},
             {"r", s.r},
             {"bad", s.bad},
             {"max_star_entries", s.max_star_entries},
             {"mean_star_entries", s.mean_star_entries},
             {"max_hat_entries", s.max_hat_entries},
             {"mean_hat_entries", s.mean_hat_entries},
             {"max_serialized_bits", max_bits},
             {"bits_backend_dependent", true}};
        text << "labels " << s.labels << "\nf " << s.f << "\nr " << s.r << "\n|B| " << s.bad << "\nmax l*-entries "
             << s.max_star_entries << "\nmean l*-entries " << s.mean_star_entries << "\nmax subset-label entries "
             << s.max_hat_entries << "\nmax serialized bits " << max_bits << " (backend-dependent)\n";
      } else {
        std::size_t max_entries = 0, max_bits = 0;
        double sum = 0;
        for (Vertex v = 0; v < reader.size(); ++v) {
          auto bytes = reader.record(v);
          max_bits = std::max(max_bits, 8 * bytes.size());
          const auto e = deserialize_warmup_label(bytes)->star_entries();
          max_entries = std::max(max_entries, e);
          sum += static_cast<double>(e);
        }
        const double mean = reader.size() ? sum / static_cast<double>(reader.size()) : 0;
        j = {{"scheme", "warmup"},         {"labels", reader.size()},         {"max_star_entries", max_entries},
             {"mean_star_entries", mean},  {"max_serialized_bits", max_bits}, {"bits_backend_dependent", true}};
        text << "labels " << reader.size() << "\nmax l*-entries " << max_entries << "\nmean l*-entries " << mean
             << "\nmax serialized bits " << max_bits << " (backend-dependent)\n";
      }
      emit(globals, j, text.str());
      return kPass;
    }

    if (*verify) {
      const Instance inst = load_instance(verify_graph);
      verify_opts.seed = globals.seed.value_or(0);
      const auto report = exhaustive_verify(inst.graph, inst.terminals, verify_f, parse_scheme_kind(verify_scheme), verify_opts);
      // The report is JSON in either mode.
      std::cout << report_json(report).dump(2) << '\n';
      return report.pass ? kPass : kMismatch;
    }

    if (*decomp_cmd) {
      const Instance inst = load_instance(decomp_graph);
      const auto d = decompose(inst.graph, inst.terminals, decomp_r);
      const auto rep = verify_decomposition(inst.graph, inst.terminals, decomp_r, d);
      json edges = json::array();
      for (const auto& e : d.forest.edges) edges.push_back({e.a, e.b});
      json j{{"r", decomp_r},   {"forest_edges", edges},  {"bad", vertex_list(d.bad)},
             {"p1", rep.p1_holds}, {"p2", rep.p2_holds}, {"p3", rep.p3_holds}};
      std::ostringstream text;
      text << "r " << decomp_r << "\nforest edges";
      for (const auto& e : d.forest.edges) text << ' ' << e.a << '-' << e.b;
      text << "\nB";
      for (Vertex b : d.bad) text << ' ' << b;
      text << "\nP1 " << (rep.p1_holds ? "holds" : "fails") << "\nP2 " << (rep.p2_holds ? "holds" : "fails") << "\nP3 "
           << (rep.p3_holds ? "holds" : "fails") << '\n';
      emit(globals, j, text.str());
      return rep.all() ? kPass : kMismatch;
    }

    if (*bench) {
      ExperimentConfig base;
      base.family = parse_family(bench_family);
      base.p = bench_p;
      if (!globals.seed) throw Error("bench needs --seed");
      base.seed = globals.seed;
      const auto scheme = parse_scheme_kind(bench_scheme);
      BenchOptions options{per_terminal, globals.threads, !no_bits};
      const auto result = run_scaling_bench(base, u_sizes, bench_f, reps, scheme, options);
      if (!bench_csv_path.empty()) {
        std::ofstream out(bench_csv_path);
        if (!out) throw Error("cannot write '" + bench_csv_path + "'");
        out << bench_csv(result);
      }
      std::ostringstream text;
      text << bench_csv(result) << "# fitted exponent " << result.exponent << '\n';
      emit(globals, bench_json(result, bench_f, scheme), text.str());
      for (const auto& row : result.rows)
        if (!row.error.empty()) return kMismatch;
      return kPass;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMismatch;
  }
  return kUsage;
}
