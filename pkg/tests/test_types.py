import doctest
import unittest

import spin_symmetry.types
from spin_symmetry.exc import NoDefaultError, NoValueError
from spin_symmetry.types import Option


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite(spin_symmetry.types))
    return tests


class TestOption(unittest.TestCase):
    def test_default_is_value(self):
        option = Option(4000)
        self.assertTrue(option.has_default)
        self.assertFalse(option.has_value)
        self.assertEqual(option.default, 4000)
        self.assertEqual(option.value, 4000)

    def test_value_overrides_default(self):
        option = Option(4000)
        option.value = 8000
        self.assertTrue(option.has_value)
        self.assertEqual(option.value, 8000)
        self.assertEqual(option.default, 4000)

    def test_no_default(self):
        option = Option()
        self.assertFalse(option.has_default)
        self.assertRaises(NoDefaultError, getattr, option, "default")
        self.assertRaises(NoValueError, getattr, option, "value")
        self.assertIn("[NO DEFAULT VALUE]", str(option))
        self.assertIn("[NO VALUE SET]", str(option))

    def test_default_must_be_serializable(self):
        self.assertRaises(TypeError, Option, object())

    def test_derived_default(self):
        potential = Option({"kind": "constant", "value": 0.0})
        shape = Option(potential)
        self.assertEqual(shape.default, {"kind": "constant", "value": 0.0})
        potential.value = {"kind": "constant", "value": -2.0}
        self.assertEqual(shape.value, {"kind": "constant", "value": -2.0})
        shape.value = None
        self.assertIsNone(shape.value)

    def test_validate(self):
        option = Option(1, validator=lambda v: None if v > 0 else "must be positive")
        self.assertIsNone(option.validate(1))
        self.assertEqual(option.validate(-1), "must be positive")
        self.assertIsNone(Option(1).validate("anything"))
