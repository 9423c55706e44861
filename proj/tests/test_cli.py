"""End-to-end checks of the flatlab binary."""
import json
import os
import subprocess
import sys
import tempfile
import unittest

BIN, SCENARIOS, SCHEMA = sys.argv[1:4]
del sys.argv[1:4]


def run(*args, env=None):
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=env)


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.catalog = [line.split("\t") for line in run("list").stdout.splitlines()]
        cls.reports = {}
        for name, _, _ in cls.catalog:
            p = run("run", name)
            cls.reports[name] = (p.returncode, p.stdout)

    def test_catalog(self):
        names = [c[0] for c in self.catalog]
        self.assertEqual(names, sorted(names))
        for want in ["circle3", "torus9", "wedge2", "genus2", "elliptic-family", "theta-l1", "theta-l2", "dbar-ot"]:
            self.assertIn(want, names)
        for name in names:
            with open(os.path.join(SCENARIOS, name + ".json")) as f:
                self.assertEqual(json.load(f)["name"], name)

    def test_shipped_scenarios_pass(self):
        for name, (rc, out) in self.reports.items():
            with self.subTest(name=name):
                self.assertEqual(rc, 0)
                rep = json.loads(out)
                self.assertTrue(rep["pass"])
                self.assertEqual(rep["provenance"]["seed"], rep["scenario"]["seed"])
                for v in rep["verdicts"]:
                    self.assertEqual(set(v), {"name", "measured", "threshold", "relation", "pass"})

    def test_schema(self):
        try:
            import jsonschema
        except ImportError:
            self.skipTest("jsonschema not installed")
        with open(SCHEMA) as f:
            schema = json.load(f)
        for name, (_, out) in self.reports.items():
            with self.subTest(name=name):
                jsonschema.validate(json.loads(out), schema)

    def test_deterministic(self):
        for name in ["circle3_jump", "theta-l2", "dbar-curvature", "elliptic-family-minus"]:
            self.assertEqual(run("run", name).stdout, self.reports[name][1])
        a = run("run", "wedge2", "--seed", "99").stdout
        self.assertEqual(a, run("run", "wedge2", "--seed", "99").stdout)
        self.assertEqual(json.loads(a)["provenance"]["seed"], 99)

    def test_circle3_jump_generators(self):
        rep = json.loads(self.reports["circle3_jump"][1])
        self.assertEqual(rep["results"]["generators_text"], ["g1 - 1"])

    def test_missing_path(self):
        p = run("run", "/no/such/scenario.json")
        self.assertEqual(p.returncode, 2)
        self.assertIn("ParseError", p.stderr)

    def test_malformed_and_schema_errors(self):
        with tempfile.TemporaryDirectory() as d:
            bad = os.path.join(d, "bad.json")
            with open(bad, "w") as f:
                f.write("{not json")
            p = run("run", bad)
            self.assertEqual(p.returncode, 2)
            self.assertIn("ParseError", p.stderr)
            with open(bad, "w") as f:
                json.dump({"kind": "nope", "payload": {}}, f)
            p = run("run", bad)
            self.assertEqual(p.returncode, 2)
            self.assertIn("SchemaError", p.stderr)

    def test_zero_tolerance_fails(self):
        with open(os.path.join(SCENARIOS, "theta-l1.json")) as f:
            sc = json.load(f)
        sc["tolerances"] = {"quasi_periodicity_residual": 0.0}
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "strict.json")
            with open(path, "w") as f:
                json.dump(sc, f)
            p = run("run", path)
            self.assertEqual(p.returncode, 1)
            failing = [v for v in json.loads(p.stdout)["verdicts"] if not v["pass"]]
            self.assertEqual([v["name"] for v in failing], ["quasi_periodicity_residual"])
        self.assertEqual(run("run", "circle3", "--tol", "0").returncode, 1)

    def test_out_and_csv(self):
        with tempfile.TemporaryDirectory() as d:
            out = os.path.join(d, "r.csv")
            p = run("run", "dbar-pushforward", "--format", "csv", "--out", out)
            self.assertEqual(p.returncode, 0)
            self.assertTrue(p.stdout.startswith("PASS "))
            with open(out) as f:
                rows = f.read().splitlines()
            self.assertEqual(rows[0], "case,m,a,b,lhs,rhs,ratio")
            self.assertEqual(len(rows), 6)

    def test_module_subcommands(self):
        with tempfile.TemporaryDirectory() as d:
            params = os.path.join(d, "params.json")
            with open(params, "w") as f:
                json.dump({"Z": [[[0, 1]]]}, f)
            rep = json.loads(run("theta", "eval", params).stdout)
            self.assertAlmostEqual(rep["results"]["eval"][0]["value"][0], 1.086434811213308, places=12)
            self.assertNotIn("quasi_max_relative_residual", rep["results"])
            p = run("dbar", "cutoff", os.path.join(SCENARIOS, "dbar-cutoff.json"), "--format", "csv")
            self.assertEqual(p.returncode, 0)
            self.assertTrue(p.stdout.startswith("r,lambda,dbar_abs"))
            self.assertEqual(run("cech", os.path.join(SCENARIOS, "theta-l1.json")).returncode, 2)

    def test_examples_override(self):
        with tempfile.TemporaryDirectory() as d:
            with open(os.path.join(SCENARIOS, "circle3.json")) as f:
                sc = json.load(f)
            sc["name"] = "only-one"
            with open(os.path.join(SCENARIOS, "data", "circle3.json")) as f:
                sc["payload"]["datum"] = json.load(f)
            with open(os.path.join(d, "x.json"), "w") as f:
                json.dump(sc, f)
            env = dict(os.environ, FLATLAB_EXAMPLES=d)
            self.assertEqual(run("list", env=env).stdout.split("\t")[0], "only-one")
            self.assertEqual(run("run", "only-one", env=env).returncode, 0)

    def test_batch(self):
        p = run("run", "circle3", "wedge2_jump")
        self.assertEqual(p.returncode, 0)
        reps = json.loads(p.stdout)
        self.assertEqual([r["scenario"]["name"] for r in reps], ["circle3", "wedge2_jump"])


if __name__ == "__main__":
    unittest.main()
