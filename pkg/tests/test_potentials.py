import doctest
import math
import unittest

import numpy as np

import spin_symmetry.potentials
from spin_symmetry.potentials import (
    Constant,
    Harmonic,
    PotentialProfile,
    Product,
    Scaled,
    SquareWell,
    Sum,
    Tanh,
    WoodsSaxon,
    make_profile,
    validate_profile,
)


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite(spin_symmetry.potentials))
    return tests


class TestMakeProfile(unittest.TestCase):
    def test_number(self):
        self.assertEqual(make_profile(2), Constant(2.0))

    def test_profile_passes_through(self):
        well = SquareWell(-5, 1)
        self.assertIs(make_profile(well), well)

    def test_mapping(self):
        profile = make_profile({"kind": "tanh", "amplitude": 1, "width": 2})
        self.assertIsInstance(profile, Tanh)
        self.assertEqual(profile.width, 2.0)

    def test_unknown_kind(self):
        with self.assertRaises(ValueError) as context:
            make_profile({"kind": "lorentzian"})
        self.assertIn("lorentzian", str(context.exception))
        self.assertIn("woods_saxon", str(context.exception))

    def test_bad_parameters(self):
        self.assertRaises(ValueError, make_profile, {"kind": "square_well", "depth": -1})
        self.assertRaises(ValueError, make_profile, {"kind": "harmonic", "k": 1, "x": 2})

    def test_validate_profile(self):
        self.assertIsNone(validate_profile({"kind": "harmonic", "k": 1}))
        self.assertIsNotNone(validate_profile(None))
        self.assertIsNotNone(validate_profile("abc"))
        self.assertIsNotNone(validate_profile({"kind": "woods_saxon", "depth": 1}))

    def test_bad_geometry(self):
        self.assertRaises(ValueError, WoodsSaxon, -60, 0, 0.6)
        self.assertRaises(ValueError, WoodsSaxon, -60, 4, -0.6)
        self.assertRaises(ValueError, SquareWell, -5, 0)
        self.assertRaises(ValueError, Tanh, 1, 0)


class TestDerivatives(unittest.TestCase):
    x = np.linspace(0.2, 9.0, 45)
    h = 1e-6

    def assertDerivative(self, profile):
        numeric = (profile(self.x + self.h) - profile(self.x - self.h)) / (2 * self.h)
        np.testing.assert_allclose(profile.derivative(self.x), numeric, atol=1e-6)

    def test_woods_saxon(self):
        self.assertDerivative(WoodsSaxon(-60, 4, 0.6))

    def test_tanh(self):
        self.assertDerivative(Tanh(1.5, 2))

    def test_harmonic(self):
        self.assertDerivative(Harmonic(0.7))

    def test_product(self):
        self.assertDerivative(Product(Tanh(1, 2), WoodsSaxon(-3, 4, 0.6)))

    def test_sum_and_scaled(self):
        self.assertDerivative(Constant(-2) + 0.1 * WoodsSaxon(-60, 4, 0.6))

    def test_woods_saxon_is_even(self):
        well = WoodsSaxon(-60, 4, 0.6)
        self.assertEqual(well(-3.0), well(3.0))
        self.assertEqual(well.derivative(-3.0), -well.derivative(3.0))


class TestProfiles(unittest.TestCase):
    def test_square_well(self):
        well = SquareWell(-5, 1)
        self.assertEqual(well(np.array([-0.5, 0.5, 1.5])).tolist(), [-5.0, -5.0, 0.0])
        self.assertEqual(well.breakpoints, (1.0,))
        self.assertEqual(float(well.derivative(0.5)), 0.0)

    def test_scalar_in_scalar_out(self):
        self.assertIsInstance(float(WoodsSaxon(-60, 4, 0.6)(1.0)), float)
        self.assertEqual(np.ndim(Constant(3)(1.0)), 0)
        self.assertEqual(Constant(3)(np.zeros(4)).shape, (4,))

    def test_asymptotes(self):
        self.assertEqual(WoodsSaxon(-60, 4, 0.6).asymptote, 0.0)
        self.assertEqual(Sum(Constant(-2), SquareWell(-5, 1)).asymptote, -2.0)
        self.assertEqual(Harmonic(1).asymptote, math.inf)
        self.assertEqual(Harmonic(-1).asymptote, -math.inf)
        self.assertEqual(Scaled(0, Harmonic(1)).asymptote, 0.0)
        self.assertEqual(Tanh(3, 1).asymptote, 3.0)

    def test_is_constant(self):
        self.assertTrue(Constant(1).is_constant())
        self.assertTrue((Constant(1) + Constant(2)).is_constant())
        self.assertTrue(Scaled(0, Tanh()).is_constant())
        self.assertFalse((Constant(1) + Tanh()).is_constant())

    def test_composite_breakpoints(self):
        profile = SquareWell(-5, 2) + SquareWell(-1, 1) * Tanh()
        self.assertEqual(profile.breakpoints, (1.0, 2.0))

    def test_operators(self):
        well = SquareWell(-5, 1)
        self.assertIsInstance(-well, Scaled)
        self.assertIsInstance(2 + well, Sum)
        self.assertIsInstance(well * Tanh(), Product)
        self.assertEqual(float((-well)(0.0)), 5.0)

    def test_composite_round_trip(self):
        profile = Constant(-2) + 0.1 * Product(Tanh(1, 2), WoodsSaxon(-60, 4, 0.6))
        data = profile.to_dict()
        self.assertEqual(data["kind"], "sum")
        self.assertEqual(data["terms"][1]["profile"]["first"]["kind"], "tanh")
        self.assertEqual(PotentialProfile.from_dict(data), profile)
        self.assertEqual(hash(make_profile(data)), hash(profile))
