import os
import unittest

from spin_symmetry.checker import Checker
from spin_symmetry.config import make_schema
from spin_symmetry.loader import Loader
from spin_symmetry.settings import Settings
from spin_symmetry.types import Option


RUN_FILE = os.path.join(os.path.dirname(__file__), "spin-symmetry.cfg")


class TestChecker(unittest.TestCase):
    def test_checker(self):
        loader = Loader(f"{RUN_FILE}#test")
        schema = make_schema()
        settings = loader.load(schema)
        checker = Checker(loader.file_name, loader.section, loader.registry)
        self.assertTrue(checker.check(schema, settings))
        self.assertEqual(checker.errors, [])

    def test_bad_section(self):
        settings, errors = Loader(f"{RUN_FILE}#test:bad").load_and_check(make_schema())
        self.assertIsNone(settings)
        fields = [name for name, _ in errors]
        self.assertEqual(fields[0], "radial.colour")
        for name in (
            "radial.grid.points",
            "radial.potential",
            "radial.breaking.shape",
            "radial.window",
        ):
            with self.subTest(name=name):
                self.assertIn(name, fields)

    def test_messages_name_the_file(self):
        _, errors = Loader(f"{RUN_FILE}#test:bad").load_and_check(make_schema())
        messages = dict(errors)
        self.assertIn("lorentzian", messages["radial.potential"])
        self.assertIn("test:bad", messages["radial.grid.points"])
        self.assertIn("Unknown setting", messages["radial.colour"])

    def test_missing_value(self):
        schema = {"required": Option(), "optional": Option(1)}
        checker = Checker(None)
        self.assertFalse(checker.check(schema, Settings({"optional": 1})))
        self.assertEqual(checker.errors, [("required", "Setting has no value")])

    def test_missing_nested_value(self):
        schema = {"grid": {"points": Option(), "r_max": Option(40.0)}}
        checker = Checker(None)
        self.assertFalse(checker.check(schema, Settings({"grid": {"r_max": 40.0}})))
        self.assertEqual(checker.errors, [("grid.points", "Setting has no value")])
        self.assertFalse(checker.check(schema, Settings()))
        self.assertEqual(len(checker.errors), 2)

    def test_load_and_check_uses_a_private_schema(self):
        schema = make_schema()
        Loader(f"{RUN_FILE}#test").load_and_check(schema)
        self.assertFalse(schema["radial"]["grid"]["points"].has_value)
