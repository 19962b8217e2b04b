import contextlib
import io
import json
import os
import tempfile
import unittest

from spin_symmetry.color_printer import ColorPrinter
from spin_symmetry.config import load_config
from spin_symmetry.exc import NoStateFound
from spin_symmetry.reports import read_csv
from spin_symmetry.runner import kappa_pairs, m_j_pairs, run


PRESETS = "spin_symmetry:presets.cfg"


class RunnerTestCase(unittest.TestCase):
    def setUp(self):
        self._directory = tempfile.TemporaryDirectory()
        self.out = self._directory.name
        self.printer = ColorPrinter(quiet=True)

    def tearDown(self):
        self._directory.cleanup()

    def run_preset(self, section, command, out=None, **overrides):
        config = load_config(f"{PRESETS}#{section}", overrides=overrides, command=command)
        with contextlib.redirect_stdout(io.StringIO()):
            return run(config, out or self.out, printer=self.printer)

    def load_json(self, command, out=None):
        with open(os.path.join(out or self.out, f"{command}.json")) as fp:
            return json.load(fp)


class TestVerifyAlgebra(RunnerTestCase):
    def test_verify_algebra(self):
        result = self.run_preset("spin", "verify-algebra", **{"algebra.samples": 10})
        self.assertTrue(result.passed, result.results["checks"])
        self.assertEqual(result.files, [os.path.join(self.out, "verify-algebra.json")])
        self.assertFalse(os.path.exists(os.path.join(self.out, "verify-algebra.csv")))
        document = self.load_json("verify-algebra")
        self.assertTrue(document["pass"])
        self.assertEqual(document["metadata"]["command"], "verify-algebra")
        self.assertEqual(document["results"]["candidates"], ["gamma0", "i*gamma0*gamma5"])
        self.assertEqual(document["results"]["implication_counterexamples"], [])
        self.assertEqual(document["results"]["sweep"]["contexts"], 40)
        self.assertEqual(document["results"]["sweep"]["failures"], [])
        self.assertTrue(all(document["results"]["checks"].values()))


class TestRadialCommands(RunnerTestCase):
    fast = {"radial.grid.points": 2000}

    def test_spin_doublets(self):
        result = self.run_preset("spin", "doublets", **{"radial.kappas": [1, -2]}, **self.fast)
        self.assertTrue(result.passed)
        self.assertTrue(result.rows)
        for row in result.rows:
            self.assertEqual((row["kappa"], row["partner_kappa"]), (1, -2))
            self.assertLessEqual(row["splitting"], 1e-8)
        frame = read_csv(os.path.join(self.out, "doublets.csv"))
        self.assertEqual(len(frame), len(result.rows))
        self.assertEqual(list(frame["kappa"].unique()), [1])
        with open(os.path.join(self.out, "doublets.csv")) as fp:
            self.assertEqual(fp.readline(), "# spin-symmetry doublets schema v1\n")

    def test_pseudospin_doublets(self):
        result = self.run_preset(
            "pseudospin", "doublets", **{"radial.kappas": [-1, 2]}, **self.fast
        )
        self.assertTrue(result.passed)
        self.assertTrue(all(row["partner_kappa"] == 2 for row in result.rows))

    def test_broken_doublets_split(self):
        result = self.run_preset("broken", "doublets", **{"radial.kappas": [1, -2]}, **self.fast)
        self.assertTrue(result.passed)
        self.assertTrue(all(row["splitting"] > 1e-3 for row in result.rows))
        self.assertEqual(result.rows[0]["branch"], "broken")

    def test_spectrum_matches_the_oracle(self):
        result = self.run_preset("spin", "spectrum", **{"radial.kappas": [1]})
        self.assertTrue(result.passed)
        for row in result.rows:
            self.assertIsNotNone(row["oracle_energy"])
            self.assertEqual(row["partner_kappa"], -2)
        document = self.load_json("spectrum")
        self.assertEqual(document["results"]["levels"], len(result.rows))
        self.assertEqual(len(document["rows"]), len(result.rows))

    def test_scan_breaking(self):
        result = self.run_preset(
            "spin", "scan-breaking", **{"radial.kappas": [1, -2]}, **self.fast
        )
        self.assertTrue(result.passed)
        self.assertEqual([row["amplitude"] for row in result.rows], [0.05, 0.1, 0.2])
        self.assertEqual(result.results["increasing"], [True])
        frame = read_csv(os.path.join(self.out, "scan-breaking.csv"))
        self.assertEqual(list(frame.columns)[:3], ["dimension", "branch", "amplitude"])

    def test_solver_errors_name_the_channel(self):
        with self.assertRaises(NoStateFound) as context:
            self.run_preset("spin", "spectrum", **{"radial.window": [0.1, 1.0]}, **self.fast)
        self.assertIn("kappa=", str(context.exception))


class TestLowDimensionalCommands(RunnerTestCase):
    def test_axial_spectrum(self):
        result = self.run_preset("axial", "spectrum", **{"axial.points": 400})
        self.assertTrue(result.passed)
        self.assertEqual({row["channel"] for row in result.rows}, {1, -1})
        self.assertTrue(result.results["symmetry_report"]["pass"])

    def test_axial_scan(self):
        result = self.run_preset("axial", "scan-breaking", **{"axial.points": 400})
        self.assertEqual(len(result.rows), 3)
        self.assertTrue(all(row["splitting"] > 0 for row in result.rows))

    def test_planar_spectrum(self):
        result = self.run_preset("planar", "spectrum", **{"planar.m_j": [0.5, 1.5, -0.5]})
        self.assertTrue(result.passed)
        self.assertEqual({row["m_j"] for row in result.rows}, {0.5, 1.5, -0.5})
        for report in result.results["symmetry_reports"]:
            self.assertTrue(report["pass"])

    def test_planar_doublets(self):
        result = self.run_preset("planar", "doublets", **{"planar.m_j": [1.5, -0.5]})
        self.assertTrue(result.passed)
        self.assertTrue(all(row["partner_m_j"] == -0.5 for row in result.rows))


class TestDeterminism(RunnerTestCase):
    def test_repeated_runs_write_the_same_files(self):
        outs = [os.path.join(self.out, name) for name in ("first", "second")]
        for out in outs:
            self.run_preset("axial", "spectrum", out=out, **{"axial.points": 400})
        csvs = []
        documents = []
        for out in outs:
            with open(os.path.join(out, "spectrum.csv"), "rb") as fp:
                csvs.append(fp.read())
            document = self.load_json("spectrum", out)
            del document["metadata"]["generated_at"]
            documents.append(document)
        self.assertEqual(csvs[0], csvs[1])
        self.assertEqual(documents[0], documents[1])


class TestPairs(unittest.TestCase):
    def test_kappa_pairs(self):
        self.assertEqual(kappa_pairs([1, -2, 2, -3, -1], "spin"), [(1, -2), (2, -3)])
        self.assertEqual(kappa_pairs([-1, 2, -2], "pseudospin"), [(-1, 2), (-2, 3)])

    def test_m_j_pairs(self):
        self.assertEqual(m_j_pairs([0.5, 1.5, -0.5], "spin"), [(1.5, -0.5)])
        self.assertEqual(m_j_pairs([0.5, -1.5], "pseudospin"), [(0.5, -1.5)])
