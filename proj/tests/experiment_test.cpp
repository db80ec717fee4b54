#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "ftsc/experiment.hpp"
#include "ftsc/label_file.hpp"
#include "support.hpp"

using namespace ftsc;
using namespace ftsc::testing;

TEST(Generate, GridThreeByThree) {
  ExperimentConfig c;
  c.family = Family::Grid;
  c.rows = 3;
  c.cols = 3;
  auto inst = gen_instance(c);
  EXPECT_EQ(inst.graph.num_vertices(), 9u);
  EXPECT_EQ(inst.graph.num_edges(), 12u);
  EXPECT_EQ(inst.terminals.size(), 9u);
}

TEST(Generate, StarLeaves) {
  ExperimentConfig c;
  c.family = Family::Star;
  c.n = 6;
  c.terminals = TerminalRule::Leaves;
  auto inst = gen_instance(c);
  EXPECT_EQ(inst.graph, star_graph(5));
  EXPECT_EQ(inst.terminals.vertices(), (VertexSet{1, 2, 3, 4, 5}));
}

TEST(Generate, GnpDeterministic) {
  ExperimentConfig c;
  c.n = 12;
  c.p = 0.4;
  c.seed = 7;
  auto a = gen_instance(c);
  auto b = gen_instance(c);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.terminals, b.terminals);
  c.seed = 8;
  EXPECT_FALSE(gen_instance(c).graph == a.graph);
}

TEST(Generate, RandomTreeIsATree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ExperimentConfig c;
    c.family = Family::Tree;
    c.n = 30;
    c.seed = seed;
    auto inst = gen_instance(c);
    EXPECT_EQ(inst.graph.num_edges(), 29u);
    EXPECT_EQ(components(inst.graph).count, 1u);
  }
}

TEST(Generate, RandomKTerminals) {
  ExperimentConfig c;
  c.n = 50;
  c.seed = 3;
  c.terminals = TerminalRule::RandomK;
  c.k = 17;
  EXPECT_EQ(gen_instance(c).terminals.size(), 17u);
  c.k = 51;
  EXPECT_THROW(gen_instance(c), Error);
}

TEST(Generate, SeedRequiredForRandomFamilies) {
  ExperimentConfig c;
  c.n = 10;
  EXPECT_THROW(gen_instance(c), Error);
}

TEST(Generate, GnpWithoutTerminalsFails) {
  ExperimentConfig c;
  c.n = 5;
  c.p = 0.0;
  c.seed = 1;
  c.terminals = TerminalRule::Leaves;
  EXPECT_THROW(gen_instance(c), GenerationFailed);
}

TEST(Bench, SlopeOfExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double x : {16.0, 64.0, 256.0}) pts.emplace_back(std::log(x), std::log(3 * std::sqrt(x)));
  EXPECT_NEAR(least_squares_slope(pts), 0.5, 1e-12);
}

TEST(Bench, SingleBitIsFlat) {
  ExperimentConfig c;
  c.seed = 5;
  auto r = run_scaling_bench(c, {8, 16, 32}, 1, 2);
  EXPECT_NEAR(r.exponent, 0.0, 1e-12);
  for (const auto& row : r.rows) EXPECT_TRUE(row.error.empty());
}

TEST(Bench, ReproducibleAcrossThreadCounts) {
  ExperimentConfig c;
  c.seed = 6;
  BenchOptions one;
  BenchOptions four;
  four.threads = 4;
  auto a = run_scaling_bench(c, {8, 16, 32}, 2, 3, SchemeKind::Main, one);
  auto b = run_scaling_bench(c, {8, 16, 32}, 2, 3, SchemeKind::Main, four);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].terminals, b.rows[i].terminals);
    EXPECT_EQ(a.rows[i].max_entries, b.rows[i].max_entries);
    EXPECT_EQ(a.rows[i].max_bits, b.rows[i].max_bits);
  }
  EXPECT_EQ(a.exponent, b.exponent);
}

TEST(Bench, RejectsBadTerminalLists) {
  ExperimentConfig c;
  c.seed = 1;
  EXPECT_THROW(run_scaling_bench(c, {8, 16}, 2, 1), Error);
  EXPECT_THROW(run_scaling_bench(c, {16, 8, 32}, 2, 1), Error);
}

TEST(LabelFile, RandomAccessRoundtrip) {
  Rng rng(81);
  auto inst = random_instance(rng, 10, 0.3);
  const std::string path = ::testing::TempDir() + "labels_roundtrip.bin";
  auto labels = build_labels(inst.graph, inst.terminals, 2);
  write_label_file(path, labels);
  LabelFileReader reader(path);
  EXPECT_EQ(reader.scheme(), SchemeKind::Main);
  EXPECT_EQ(reader.size(), 10u);
  for (Vertex v : {7u, 0u, 9u, 3u}) EXPECT_EQ(deserialize_label(reader.record(v)), labels[v]);
  EXPECT_THROW(reader.record(10), Error);

  auto warm = build_warmup_labels(inst.graph, inst.terminals, 2);
  write_warmup_label_file(path, warm, 2);
  LabelFileReader wreader(path);
  EXPECT_EQ(wreader.scheme(), SchemeKind::Warmup);
  EXPECT_EQ(deserialize_warmup_label(wreader.record(4))->owner, 4u);
  std::remove(path.c_str());
}

TEST(LabelFile, RejectsForeignFiles) {
  const std::string path = ::testing::TempDir() + "not_labels.bin";
  std::ofstream(path) << "hello world, not a label file";
  EXPECT_THROW(LabelFileReader{path}, MalformedBits);
  std::remove(path.c_str());
}
