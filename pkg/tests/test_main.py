import argparse
import contextlib
import io
import os
import tempfile
import unittest

from spin_symmetry.__main__ import main, parse_override
from spin_symmetry.color_printer import color_printer


PRESETS = "spin_symmetry:presets.cfg"


class TestParseOverride(unittest.TestCase):
    def test_json_value(self):
        self.assertEqual(parse_override("radial.kappas=[1, -2]"), ("radial.kappas", [1, -2]))
        self.assertEqual(parse_override("seed=5"), ("seed", 5))

    def test_plain_string(self):
        self.assertEqual(parse_override("output.directory=runs"), ("output.directory", "runs"))

    def test_value_with_equals_sign(self):
        self.assertEqual(parse_override("output.directory=a=b"), ("output.directory", "a=b"))

    def test_missing_value(self):
        self.assertRaises(argparse.ArgumentTypeError, parse_override, "seed")


class TestMain(unittest.TestCase):
    def setUp(self):
        self._directory = tempfile.TemporaryDirectory()
        self.out = self._directory.name
        self.quiet = color_printer.quiet

    def tearDown(self):
        color_printer.quiet = self.quiet
        self._directory.cleanup()

    def main(self, *argv):
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            status = main(list(argv) + ["--out", self.out])
        return status, stdout.getvalue(), stderr.getvalue()

    def test_pass(self):
        status, stdout, _ = self.main(
            "spectrum", "-c", f"{PRESETS}#axial", "-s", "axial.points=400", "--seed", "3"
        )
        self.assertEqual(status, 0)
        self.assertIn("spectrum: pass", stdout)
        self.assertTrue(os.path.exists(os.path.join(self.out, "spectrum.csv")))

    def test_quiet(self):
        status, stdout, _ = self.main(
            "spectrum", "-c", f"{PRESETS}#axial", "-s", "axial.points=400", "-q"
        )
        self.assertEqual(status, 0)
        self.assertEqual(stdout, "")

    def test_solver_error(self):
        status, _, stderr = self.main(
            "spectrum",
            "-c",
            f"{PRESETS}#spin",
            "-s",
            "radial.window=[0.1, 1.0]",
            "-s",
            "radial.grid.points=1000",
            "-q",
        )
        self.assertEqual(status, 1)
        self.assertIn("spectrum failed", stderr)

    def test_config_errors(self):
        status, _, stderr = self.main("spectrum", "-c", "/no/such/run.cfg", "-q")
        self.assertEqual(status, 2)
        status, _, stderr = self.main(
            "spectrum", "-c", f"{PRESETS}#spin", "-s", "radial.grid.points=-1", "-q"
        )
        self.assertEqual(status, 2)
        self.assertIn("radial.grid.points", stderr)

    def test_unknown_command(self):
        with self.assertRaises(SystemExit) as context:
            self.main("rotate")
        self.assertEqual(context.exception.code, 2)

    def test_bad_override(self):
        with self.assertRaises(SystemExit) as context:
            self.main("spectrum", "-s", "seed")
        self.assertEqual(context.exception.code, 2)
