"""End-to-end checks of the ftsc command line tool."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

EXE = None
SCHEMA = None


def run(*args):
    return subprocess.run([EXE, *args], capture_output=True, text=True)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.dir, name)

    def write(self, name, text):
        with open(self.path(name), "w") as f:
            f.write(text)
        return self.path(name)

    def test_gen_is_deterministic(self):
        a = run("--seed", "4", "gen", "--family", "gnp", "--n", "20")
        b = run("--seed", "4", "gen", "--family", "gnp", "--n", "20")
        self.assertEqual(a.returncode, 0, a.stderr)
        self.assertEqual(a.stdout, b.stdout)
        header = a.stdout.splitlines()[0].split()
        self.assertEqual(header[0], "20")

    def test_gen_grid_json(self):
        out = run("--json", "gen", "--family", "grid", "--rows", "3", "--cols", "3", "--out", self.path("g.txt"))
        self.assertEqual(out.returncode, 0, out.stderr)
        self.assertEqual(json.loads(out.stdout), {"out": self.path("g.txt"), "n": 9, "m": 12, "terminals": 9})

    def test_gen_needs_seed_for_random_family(self):
        self.assertEqual(run("gen", "--family", "gnp", "--n", "10").returncode, 1)
        self.assertEqual(run("bench", "--u-sizes", "8,16,32", "--reps", "1").returncode, 1)
        self.assertEqual(run("gen", "--family", "grid", "--rows", "2", "--cols", "2").returncode, 0)

    def test_build_query_stats_roundtrip(self):
        graph = self.write("c5.txt", "5 5 2\n0 1\n1 2\n2 3\n3 4\n0 4\n0 2\n")
        for scheme in ("main", "warmup"):
            labels = self.path(scheme + ".bin")
            out = run("build", "--graph", graph, "--f", "2", "--out", labels, "--scheme", scheme)
            self.assertEqual(out.returncode, 0, out.stderr)
            yes = run("query", "--labels", labels, "--faults", "1,3")
            self.assertEqual((yes.returncode, yes.stdout.strip()), (0, "YES"))
            no = run("--json", "query", "--labels", labels, "--faults", "4")
            self.assertEqual(no.returncode, 0, no.stderr)
            self.assertFalse(json.loads(no.stdout)["steiner_cut"])
            stats = run("--json", "stats", "--labels", labels)
            self.assertEqual(stats.returncode, 0, stats.stderr)
            self.assertEqual(json.loads(stats.stdout)["scheme"], scheme)

    def test_query_reports_separated_pair(self):
        graph = self.write("c.txt", "4 4 2\n0 1\n1 2\n2 3\n0 3\n0 2\n")
        labels = self.path("c.bin")
        self.assertEqual(run("build", "--graph", graph, "--f", "2", "--out", labels).returncode, 0)
        out = run("--json", "query", "--labels", labels, "--faults", "1,3")
        j = json.loads(out.stdout)
        self.assertTrue(j["steiner_cut"])
        self.assertEqual(sorted(j["disconnected_pair"]), [0, 2])

    def test_query_too_many_faults(self):
        graph = self.write("p.txt", "3 2 2\n0 1\n1 2\n0 2\n")
        labels = self.path("p.bin")
        self.assertEqual(run("build", "--graph", graph, "--f", "1", "--out", labels).returncode, 0)
        self.assertEqual(run("query", "--labels", labels, "--faults", "0,1").returncode, 1)

    def test_corrupt_label_file(self):
        graph = self.write("p.txt", "3 2 2\n0 1\n1 2\n0 2\n")
        labels = self.path("p.bin")
        self.assertEqual(run("build", "--graph", graph, "--f", "1", "--out", labels).returncode, 0)
        data = bytearray(open(labels, "rb").read())
        data[-3] ^= 0x10
        open(labels, "wb").write(bytes(data))
        out = run("query", "--labels", labels, "--faults", "2")
        self.assertEqual(out.returncode, 1)
        self.assertIn("error", out.stderr)

    def test_verify_passes(self):
        graph = self.write("k.txt", "6 7 3\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n1 4\n0 2 4\n")
        for scheme in ("main", "warmup"):
            out = run("verify", "--graph", graph, "--f", "2", "--scheme", scheme)
            self.assertEqual(out.returncode, 0, out.stderr)
            report = json.loads(out.stdout)
            self.assertTrue(report["pass"])
            self.assertEqual(report["queries"], 21)
            self.assertFalse(report["sampled"])
            self.assertEqual(report["mismatches"], [])

    def test_verify_samples_above_budget(self):
        graph = self.write("p.txt", "6 5 2\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n")
        out = run("--seed", "11", "verify", "--graph", graph, "--f", "3", "--budget", "5", "--samples", "40")
        report = json.loads(out.stdout)
        self.assertEqual(out.returncode, 0)
        self.assertTrue(report["sampled"])
        self.assertEqual(report["seed"], 11)
        self.assertEqual(report["queries"], 40)

    def test_decomp(self):
        graph = self.write("s.txt", "6 5 5\n0 1\n0 2\n0 3\n0 4\n0 5\n1 2 3 4 5\n")
        out = run("--json", "decomp", "--graph", graph, "--r", "3")
        self.assertEqual(out.returncode, 0, out.stderr)
        j = json.loads(out.stdout)
        self.assertEqual(j["bad"], [0])
        self.assertTrue(j["p1"] and j["p2"] and j["p3"])
        text = run("decomp", "--graph", graph, "--r", "3")
        self.assertIn("P3 holds", text.stdout)

    def test_bench_json_matches_schema(self):
        with open(SCHEMA) as f:
            schema = json.load(f)
        csv = self.path("bench.csv")
        out = run("--seed", "3", "--json", "--threads", "2", "bench", "--u-sizes", "8,16,32", "--reps", "2", "--csv", csv)
        self.assertEqual(out.returncode, 0, out.stderr)
        j = json.loads(out.stdout)
        jsonschema.validate(j, schema)
        self.assertEqual(len(j["rows"]), 6)
        lines = open(csv).read().splitlines()
        self.assertEqual(lines[0], "terminals,rep,scheme,n,r,bad,max_entries,mean_entries,max_bits,error")
        self.assertEqual(len(lines), 7)
        again = run("--seed", "3", "--json", "bench", "--u-sizes", "8,16,32", "--reps", "2")
        self.assertEqual(json.loads(again.stdout)["rows"], j["rows"])
        warm = run("--seed", "3", "--json", "bench", "--u-sizes", "8,16,32", "--reps", "1", "--scheme", "warmup", "--f", "3")
        self.assertEqual(warm.returncode, 0, warm.stderr)
        jsonschema.validate(json.loads(warm.stdout), schema)

    def test_usage_errors(self):
        graph = self.write("p.txt", "3 2 2\n0 1\n1 2\n0 2\n")
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("frobnicate").returncode, 2)
        self.assertEqual(run("gen", "--family", "hypercube").returncode, 2)
        self.assertEqual(run("build", "--graph", graph, "--out", self.path("x.bin")).returncode, 2)
        self.assertEqual(run("decomp", "--graph", graph, "--r", "2").returncode, 2)
        self.assertEqual(run("query", "--labels", self.path("missing.bin"), "--faults", "0").returncode, 2)
        self.assertEqual(run("--threads", "0", "stats", "--labels", graph).returncode, 2)

    def test_malformed_graph_is_an_error(self):
        graph = self.write("bad.txt", "3 1 0\n0 x\n")
        out = run("verify", "--graph", graph, "--f", "1")
        self.assertEqual(out.returncode, 1)
        self.assertIn("error", out.stderr)

    def test_help(self):
        out = run("--help")
        self.assertEqual(out.returncode, 0)
        for sub in ("gen", "build", "query", "stats", "verify", "decomp", "bench"):
            self.assertIn(sub, out.stdout)


if __name__ == "__main__":
    EXE, SCHEMA = sys.argv[1], sys.argv[2]
    unittest.main(argv=sys.argv[:1], verbosity=2)
