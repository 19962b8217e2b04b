import datetime
import os
import tempfile
import unittest

from jsun.obj import JSONObject

from spin_symmetry.exc import (
    ConfigFileNotFoundError,
    ConfigSectionNotFoundError,
    StrategyError,
)
from spin_symmetry.strategy import (
    INIJSONStrategy,
    JSONStrategy,
    RawValue,
    get_file_type_map,
    guess_strategy_type,
)


HERE = os.path.dirname(__file__)
RUN_FILE = os.path.join(HERE, "spin-symmetry.cfg")
DERIVED_RUN_FILE = os.path.join(HERE, "runs.derived.cfg")
JSON_RUN_FILE = os.path.join(HERE, "runs.json")


class TestGuessing(unittest.TestCase):
    def test_file_type_map(self):
        self.assertEqual(get_file_type_map(), {"cfg": INIJSONStrategy, "json": JSONStrategy})

    def test_guess(self):
        self.assertIs(guess_strategy_type("runs.cfg"), INIJSONStrategy)
        self.assertIs(guess_strategy_type("/some/where/runs.json"), JSONStrategy)
        self.assertIs(guess_strategy_type("json"), JSONStrategy)
        self.assertIsNone(guess_strategy_type("runs.yaml"))


class TestINIJSONStrategy(unittest.TestCase):
    def setUp(self):
        self.strategy = INIJSONStrategy()

    def test_default_section(self):
        self.assertEqual(self.strategy.get_default_section(RUN_FILE), "test")

    def test_read_section(self):
        items = self.strategy.read_file(RUN_FILE, "test")
        self.assertEqual(items["seed"], 7)
        self.assertEqual(items["radial.kappas"], [1, -2])
        self.assertEqual(items["radial.grid.points"], 2000)

    def test_templates_are_raw(self):
        items = self.strategy.read_file(RUN_FILE, "test")
        self.assertIsInstance(items["radial.grid.r_max"], RawValue)
        self.assertEqual(items["radial.grid.r_max"], "{{ axial.length }}")
        # Valid JSON strings stay plain strings even when they hold a template
        self.assertNotIsInstance(items["output.directory"], RawValue)

    def test_section_in_file_name(self):
        items = self.strategy.read_file(f"{RUN_FILE}#test:lonely")
        self.assertEqual(items["radial.kappas"], [-1, 1])
        self.assertEqual(items["seed"], 7)

    def test_extends_in_same_file(self):
        items = self.strategy.read_file(RUN_FILE, "test:shape")
        self.assertEqual(items["radial.kappas"], [1, -2])
        self.assertEqual(items["radial.potential"]["kind"], "square_well")
        self.assertEqual(items["radial.breaking.shape"]["kind"], "tanh")
        self.assertNotIn("extends", items)

    def test_extends_package_asset(self):
        items = self.strategy.read_file(RUN_FILE, "test:pseudospin")
        self.assertEqual(items["radial.branch"], "pseudospin")
        self.assertEqual(items["radial.constant"], 2.0)
        self.assertEqual(items["radial.grid.points"], 2000)
        # DEFAULT of the extending file wins over the extended file's
        self.assertEqual(
            items["output.directory"], "results/{{ spectrum.dimension }}/{{ radial.branch }}"
        )

    def test_default_extends(self):
        items = self.strategy.read_file(DERIVED_RUN_FILE, "test")
        self.assertEqual(items["seed"], 11)
        self.assertEqual(items["radial.kappas"], [2, -3])
        self.assertEqual(items["algebra.samples"], 10)

    def test_default_extends_section_only_in_extended_file(self):
        items = self.strategy.read_file(DERIVED_RUN_FILE, "test:derived")
        self.assertEqual(items["seed"], 11)
        self.assertEqual(items["radial.potential"]["depth"], -50.0)

    def test_empty_section(self):
        items = self.strategy.read_file(RUN_FILE, "test:empty")
        self.assertEqual(items["seed"], 7)

    def test_missing_section(self):
        self.assertRaises(
            ConfigSectionNotFoundError, self.strategy.read_file, RUN_FILE, "test:nope"
        )

    def test_missing_file(self):
        file_name = os.path.join(HERE, "nope.cfg")
        self.assertRaises(ConfigFileNotFoundError, self.strategy.read_file, file_name)

    def test_write_settings(self):
        with tempfile.TemporaryDirectory() as directory:
            file_name = os.path.join(directory, "written.cfg")
            settings = {"radial.kappas": [1, -2], "output.directory": "out", "seed": 1}
            self.strategy.write_settings(settings, file_name, "run")
            self.strategy.write_settings({"seed": 2}, file_name, "other")
            self.assertEqual(self.strategy.read_file(file_name, "run"), settings)
            self.assertEqual(self.strategy.read_file(file_name, "other"), {"seed": 2})

    def test_decode_value(self):
        self.assertEqual(self.strategy.decode_value("[0.5, -0.5]"), [0.5, -0.5])
        self.assertRaises(ValueError, self.strategy.decode_value, "{{ seed }}")


class TestJSONStrategy(unittest.TestCase):
    def setUp(self):
        self.strategy = JSONStrategy()

    def test_default_section(self):
        self.assertEqual(self.strategy.get_default_section(JSON_RUN_FILE), "planar")

    def test_read_section(self):
        items = self.strategy.read_file(JSON_RUN_FILE)
        self.assertEqual(items["seed"], 3)
        self.assertEqual(items["planar.m_j"], [0.5, 1.5, -0.5])
        self.assertIsInstance(items["output.directory"], RawValue)

    def test_extends(self):
        items = self.strategy.read_file(JSON_RUN_FILE, "planar:minus")
        self.assertEqual(items["planar.relation"], "minus")
        self.assertEqual(items["spectrum.dimension"], "2d")

    def test_write_settings(self):
        with tempfile.TemporaryDirectory() as directory:
            file_name = os.path.join(directory, "written.json")
            settings = {"planar.m_j": [0.5], "planar.potential": {"kind": "constant", "value": 1}}
            self.strategy.write_settings(settings, file_name, "run")
            self.assertEqual(self.strategy.read_file(file_name, "run"), settings)

    def test_write_settings_read_from_ini(self):
        # INI values may decode to dates and jsun objects
        settings = {
            "output.stamp": datetime.date(2026, 10, 17),
            "radial.potential": JSONObject(kind="constant"),
        }
        with tempfile.TemporaryDirectory() as directory:
            file_name = os.path.join(directory, "written.json")
            self.strategy.write_settings(settings, file_name, "run")
            with open(file_name) as fp:
                text = fp.read()
            self.assertIn('"output.stamp": "2026-10-17"', text)
            self.assertEqual(
                self.strategy.read_section(file_name, "run")[0]["radial.potential"],
                {"kind": "constant"},
            )

    def test_not_sections(self):
        with tempfile.TemporaryDirectory() as directory:
            file_name = os.path.join(directory, "flat.json")
            with open(file_name, "w") as fp:
                fp.write('{"seed": 1}')
            self.assertRaises(StrategyError, self.strategy.read_file, file_name, "seed")

    def test_bad_json(self):
        with tempfile.TemporaryDirectory() as directory:
            file_name = os.path.join(directory, "bad.json")
            with open(file_name, "w") as fp:
                fp.write('{"run": {"seed": }')
            self.assertRaises(StrategyError, self.strategy.read_file, file_name, "run")
