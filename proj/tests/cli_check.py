"""End-to-end checks of the pulsefield CLI: exit codes, output schemas and
byte-identical reruns."""
import filecmp
import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

BINARY = Path(sys.argv[1])
SOURCE = Path(sys.argv[2])
CONFIGS = SOURCE / "configs"
SCHEMAS = SOURCE / "schemas"


def run(*args):
    return subprocess.run([str(BINARY), *map(str, args)], capture_output=True, text=True, timeout=600)


def validate(path, schema):
    with open(SCHEMAS / schema) as f:
        s = json.load(f)
    with open(path) as f:
        jsonschema.validate(json.load(f), s)


class Cli(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def assert_same_dirs(self, a, b):
        names = sorted(p.name for p in a.iterdir())
        self.assertEqual(names, sorted(p.name for p in b.iterdir()))
        _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        self.assertEqual(mismatch + errors, [])

    def test_curve_game(self):
        outs = []
        for k, par in enumerate((1, 2)):
            out = self.tmp / f"cg{k}"
            r = run("curve-game", "--config", CONFIGS / "fig2.cfg", "--out", out, "--trials", 300, "--seed", 5,
                    "--parallel", par)
            self.assertEqual(r.returncode, 0, r.stderr)
            outs.append(out)
        validate(outs[0] / "summary.json", "curve_game_summary.schema.json")
        validate(outs[0] / "histogram.json", "histogram.schema.json")
        self.assertEqual((outs[0] / "finals.csv").read_text().splitlines()[0], "trial,final_R")
        self.assertEqual(len((outs[0] / "finals.csv").read_text().splitlines()), 301)
        self.assertEqual((outs[0] / "series.csv").read_text().splitlines()[0], "step,mean_R,min_R")
        self.assert_same_dirs(*outs)

    def test_simulate(self):
        outs = []
        for k in range(2):
            out = self.tmp / f"sim{k}"
            r = run("simulate", "--config", CONFIGS / "simulate_n16_f4.cfg", "--out", out, "--trials", 3,
                    "--seed", 9, "--set", "fault_strategy=anti_phase")
            self.assertEqual(r.returncode, 0, r.stderr)
            outs.append(out)
        validate(outs[0] / "summary.json", "simulate_summary.schema.json")
        summary = json.loads((outs[0] / "summary.json").read_text())
        self.assertEqual(summary["config"]["fault_strategy"], "anti_phase")
        self.assertEqual([run["seed"] for run in summary["runs"]], [9, 10, 11])
        header = (outs[0] / "trace.csv").read_text().splitlines()[0]
        self.assertEqual(header, "t,node,phi,Phi,dmf_strength,dmf_angle")
        self.assert_same_dirs(*outs)

    def test_simulate_rejects_integer_trig(self):
        r = run("simulate", "--out", self.tmp / "x", "--trials", 1, "--set", "trig=integer")
        self.assertEqual(r.returncode, 2)

    def test_rayleigh(self):
        out = self.tmp / "ray"
        r = run("rayleigh-check", "--config", CONFIGS / "rayleigh.cfg", "--out", out, "--trials", 20000)
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
        validate(out / "summary.json", "rayleigh_summary.schema.json")
        self.assertEqual((out / "rayleigh.csv").read_text().splitlines()[0], "r,empirical,formula,abs_diff")

        r = run("rayleigh-check", "--config", CONFIGS / "rayleigh.cfg", "--out", out, "--trials", 20000,
                "--tolerance", 1e-6)
        self.assertEqual(r.returncode, 1)
        self.assertFalse(json.loads((out / "summary.json").read_text())["pass"])

    def test_rayleigh_warns_for_small_n(self):
        r = run("rayleigh-check", "--out", self.tmp / "small", "--trials", 2000, "--set", "n=4", "--set", "omega=1",
                "--tolerance", 1.0)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("warning", r.stderr)

    def test_trig_check(self):
        out = self.tmp / "trig"
        r = run("trig-check", "--out", out)
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)
        validate(out / "summary.json", "trig_summary.schema.json")
        self.assertEqual(len((out / "trig.csv").read_text().splitlines()), 9)

    def test_config_errors(self):
        cases = [
            ["curve-game", "--out", self.tmp / "e1", "--trials", 0],
            ["curve-game", "--out", self.tmp / "e2", "--set", "bogus=1"],
            ["curve-game", "--out", self.tmp / "e3", "--set", "mode=sideways"],
            ["curve-game", "--config", self.tmp / "missing.cfg", "--out", self.tmp / "e4"],
            ["dance", "--out", self.tmp / "e5"],
            ["curve-game", "--trials", "many"],
        ]
        for args in cases:
            with self.subTest(args=args):
                self.assertEqual(run(*args).returncode, 2)

    def test_io_error(self):
        blocker = self.tmp / "file"
        blocker.write_text("not a directory")
        r = run("trig-check", "--out", blocker / "sub")
        self.assertEqual(r.returncode, 3)


if __name__ == "__main__":
    unittest.main(argv=sys.argv[:1], verbosity=2)
