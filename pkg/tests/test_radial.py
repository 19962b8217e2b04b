import doctest
import unittest

import numpy as np

import spin_symmetry.radial
from spin_symmetry.exc import InvalidScenario, SingularDenominator
from spin_symmetry.potentials import Constant, Tanh, WoodsSaxon
from spin_symmetry.radial import (
    RadialSolution,
    SymmetryScenario,
    convergence_study,
    match_doublets,
    partner_kappa,
    radial_equations,
    residual_second_order,
    schrodinger_oracle,
    second_order_terms,
    solve_bound_states,
    solve_doublets,
    splitting_scan,
)
from spin_symmetry.shooting import RadialGrid


def load_tests(loader, tests, ignore):
    tests.addTests(doctest.DocTestSuite(spin_symmetry.radial))
    return tests


SPIN_WINDOW = (-1.999, -0.001)
PSEUDOSPIN_WINDOW = (0.001, 1.999)


def spin_scenario():
    return SymmetryScenario("spin", WoodsSaxon(-60, 4, 0.6), -2.0)


def pseudospin_scenario():
    return SymmetryScenario("pseudospin", WoodsSaxon(60, 4, 0.6), 2.0)


class TestScenario(unittest.TestCase):
    def test_branches(self):
        scenario = spin_scenario()
        self.assertEqual(scenario.v_plus, WoodsSaxon(-60, 4, 0.6))
        self.assertEqual(scenario.v_minus, Constant(-2.0))
        scenario = pseudospin_scenario()
        self.assertEqual(scenario.v_plus, Constant(2.0))
        self.assertEqual(scenario.symmetry, "pseudospin")
        self.assertTrue(scenario.exact)

    def test_broken(self):
        broken = SymmetryScenario.broken_from(spin_scenario(), Tanh(1, 2), 0.1)
        self.assertEqual(broken.branch, "broken")
        self.assertEqual(broken.symmetry, "spin")
        self.assertFalse(broken.exact)
        self.assertEqual(broken.v_plus, WoodsSaxon(-60, 4, 0.6))
        self.assertAlmostEqual(float(broken.v_minus(1e6)), -1.9)

    def test_bad_scenarios(self):
        well = WoodsSaxon(-60, 4, 0.6)
        self.assertRaises(InvalidScenario, SymmetryScenario, "isospin", well, -2)
        self.assertRaises(InvalidScenario, SymmetryScenario, "broken", well, -2)
        self.assertRaises(
            InvalidScenario, SymmetryScenario, "broken", well, -2, Tanh(), parent="broken"
        )
        self.assertRaises(InvalidScenario, SymmetryScenario, "spin", well, -2, Tanh())

    def test_mirrored(self):
        mirrored = spin_scenario().mirrored()
        self.assertEqual(mirrored.branch, "pseudospin")
        self.assertEqual(mirrored.constant, 2.0)
        depth = float(spin_scenario().potential(0.0))
        self.assertAlmostEqual(float(mirrored.potential(0.0)), -depth)
        broken = SymmetryScenario.broken_from(spin_scenario(), Tanh(), 0.1).mirrored()
        self.assertEqual((broken.branch, broken.parent), ("broken", "pseudospin"))

    def test_to_dict(self):
        data = spin_scenario().to_dict()
        self.assertEqual(data["branch"], "spin")
        self.assertEqual(data["potential"]["kind"], "woods_saxon")
        self.assertIsNone(data["breaking"])

    def test_kappa_zero(self):
        self.assertRaises(
            InvalidScenario, solve_bound_states, spin_scenario(), 0, SPIN_WINDOW
        )

    def test_radial_equations(self):
        dG, dF = radial_equations(spin_scenario(), 1, -1.0, 2.0, 1.0, 0.5)
        self.assertAlmostEqual(dG, -0.5 + (-1.0 + 2.0) * 0.5)
        self.assertRaises(InvalidScenario, radial_equations, spin_scenario(), 1, -1.0, 0.0, 1, 1)

    def test_no_partner(self):
        self.assertIsNone(partner_kappa(1, "pseudospin"))
        self.assertRaises(InvalidScenario, solve_doublets, spin_scenario(), -1, SPIN_WINDOW)


class TestSpinDoublets(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.scenario = spin_scenario()
        cls.grid = RadialGrid()
        cls.doublets = solve_doublets(cls.scenario, 1, SPIN_WINDOW, cls.grid, threads=2)

    def test_doublets_are_degenerate(self):
        self.assertTrue(self.doublets)
        for doublet in self.doublets:
            self.assertEqual(doublet.partner.kappa, -2)
            self.assertEqual(doublet.state.schrodinger_nodes, doublet.partner.schrodinger_nodes)
            self.assertLess(doublet.splitting, 1e-8)

    def test_doublet_nodes_count_up(self):
        nodes = [doublet.nodes for doublet in self.doublets]
        self.assertEqual(nodes, list(range(nodes[0], nodes[0] + len(nodes))))
        energies = [doublet.state.energy for doublet in self.doublets]
        self.assertEqual(energies, sorted(energies))

    def test_oracle_agrees(self):
        levels = dict(
            (nodes, energy)
            for energy, nodes in schrodinger_oracle(self.scenario, 1, SPIN_WINDOW, self.grid)
        )
        for doublet in self.doublets:
            with self.subTest(nodes=doublet.nodes):
                oracle = levels[doublet.nodes]
                energy = doublet.state.energy
                self.assertLess(abs(energy - oracle) / abs(energy), 1e-6)

    def test_second_order_residual(self):
        state = self.doublets[0].state
        self.assertLess(residual_second_order(state, self.scenario), 1e-5)

    def test_second_order_strict(self):
        state = self.doublets[0].state
        with self.assertRaises(SingularDenominator) as context:
            second_order_terms(state, self.scenario, strict=True)
        (radius,) = context.exception.radii
        self.assertLess(3.0, radius)
        self.assertLess(radius, 10.0)

    def test_to_dict(self):
        data = self.doublets[0].to_dict()
        self.assertEqual((data["kappa"], data["partner_kappa"]), (1, -2))
        self.assertEqual(data["nodes"], self.doublets[0].nodes)
        self.assertEqual(data["splitting"], self.doublets[0].splitting)


class TestPseudospinDoublets(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.scenario = pseudospin_scenario()
        cls.grid = RadialGrid()
        cls.doublets = solve_doublets(cls.scenario, -1, PSEUDOSPIN_WINDOW, cls.grid, threads=2)

    def test_doublets(self):
        self.assertTrue(self.doublets)
        for doublet in self.doublets:
            self.assertEqual(doublet.partner.kappa, 2)
            self.assertLess(doublet.splitting, 1e-8)

    def test_oracle_agrees(self):
        levels = dict(
            (nodes, energy)
            for energy, nodes in schrodinger_oracle(
                self.scenario, -1, PSEUDOSPIN_WINDOW, self.grid
            )
        )
        for doublet in self.doublets:
            with self.subTest(nodes=doublet.nodes):
                oracle = levels[doublet.nodes]
                energy = doublet.state.energy
                self.assertLess(abs(energy - oracle) / abs(energy), 1e-6)

    def test_second_order_residual(self):
        for doublet in self.doublets[:2]:
            with self.subTest(nodes=doublet.nodes):
                state = doublet.state
                self.assertLess(residual_second_order(state, self.scenario), 1e-5)

    def test_charge_conjugation(self):
        grid = RadialGrid(1e-6, 20.0, 2000)
        spin = solve_bound_states(spin_scenario(), 1, SPIN_WINDOW, grid)
        pseudospin = solve_bound_states(
            spin_scenario().mirrored(), -1, PSEUDOSPIN_WINDOW, grid
        )
        self.assertEqual(len(spin), len(pseudospin))
        for a, b in zip(spin, pseudospin):
            self.assertAlmostEqual(a.energy, -b.energy, places=7)


class TestSecondOrderTerms(unittest.TestCase):
    def setUp(self):
        self.grid = RadialGrid(1e-3, 10.0, 500)
        r = self.grid.r
        self.solution = RadialSolution(-2, -1.0, self.grid, r * np.exp(-r), r**2 * np.exp(-r))

    def test_constant_potential_has_no_spin_orbit_terms(self):
        scenario = SymmetryScenario("spin", Constant(-5.0), -2.0)
        terms = second_order_terms(self.solution, scenario)
        self.assertEqual(terms.excluded_radii, [])
        self.assertFalse(np.any(terms.spin_orbit))
        self.assertFalse(np.any(terms.darwin[terms.mask]))

    def test_vanishing_denominator(self):
        scenario = SymmetryScenario("spin", Constant(-1.0), -2.0)
        with self.assertRaises(SingularDenominator) as context:
            second_order_terms(self.solution, scenario)
        self.assertEqual(len(context.exception.radii), self.grid.points)

    def test_needs_exact_symmetry(self):
        broken = SymmetryScenario.broken_from(spin_scenario(), Tanh(), 0.1)
        self.assertRaises(InvalidScenario, second_order_terms, self.solution, broken)
        self.assertRaises(InvalidScenario, schrodinger_oracle, broken, 1, SPIN_WINDOW)


class TestMatchDoublets(unittest.TestCase):
    def test_pairs_by_node_count(self):
        grid = RadialGrid(1e-3, 10.0, 500)
        r = grid.r
        lower = r**2 * np.exp(-r)
        states = [
            RadialSolution(-1, -1.0, grid, r * np.exp(-r), lower),
            RadialSolution(-1, -0.5, grid, r * (r - 2) * np.exp(-r), lower),
        ]
        partners = [RadialSolution(2, -1.0 + 1e-9, grid, r * np.exp(-r), lower)]
        doublets = match_doublets(states, partners)
        self.assertEqual(len(doublets), 1)
        doublet = doublets[0]
        self.assertEqual(doublet.nodes, 0)
        self.assertAlmostEqual(doublet.splitting, 1e-9, delta=1e-12)
        self.assertEqual(doublet.to_dict()["partner_kappa"], 2)


class TestBreaking(unittest.TestCase):
    grid = RadialGrid(1e-6, 20.0, 2000)
    shape = WoodsSaxon(-5, 4, 0.6)

    def scan(self, amplitudes, **kwargs):
        return splitting_scan(
            spin_scenario(), self.shape, amplitudes, 1, SPIN_WINDOW, self.grid, **kwargs
        )

    def test_splitting_grows_with_amplitude(self):
        series = self.scan([0.0, 0.05, 0.1, 0.2])
        amplitudes = [amplitude for amplitude, _ in series]
        splittings = [doublet.splitting for _, doublet in series]
        self.assertEqual(amplitudes, [0.0, 0.05, 0.1, 0.2])
        self.assertLess(splittings[0], 1e-8)
        self.assertGreater(splittings[1], 1e-4)
        self.assertEqual(splittings, sorted(splittings))
        self.assertEqual(len(set(splittings)), 4)
        self.assertEqual(len({doublet.nodes for _, doublet in series}), 1)

    def test_follows_the_doublet_nearest_the_window_middle(self):
        exact = solve_doublets(spin_scenario(), 1, SPIN_WINDOW, self.grid)
        nearest = min(exact, key=lambda d: abs(d.state.energy + 1.0))
        ((_, doublet),) = self.scan([0.05])
        self.assertEqual(doublet.nodes, nearest.nodes)
        # The breaking deepens the constant branch, so the doublet binds deeper
        self.assertLess(doublet.state.energy, nearest.state.energy)

    def test_follows_a_given_doublet(self):
        exact = solve_doublets(spin_scenario(), 1, SPIN_WINDOW, self.grid)
        nodes = exact[-2].nodes
        series = self.scan([0.05, 0.1], nodes=nodes)
        self.assertEqual([doublet.nodes for _, doublet in series], [nodes, nodes])

    def test_missing_doublet(self):
        with self.assertRaises(InvalidScenario) as context:
            self.scan([0.05], nodes=1000)
        self.assertIn("1000 nodes", str(context.exception))

    def test_full_depth_breaking_splits(self):
        broken = SymmetryScenario.broken_from(spin_scenario(), WoodsSaxon(-60, 4, 0.6), 0.1)
        doublets = solve_doublets(broken, 1, SPIN_WINDOW, self.grid, threads=2)
        self.assertTrue(doublets)
        for doublet in doublets:
            self.assertGreater(doublet.splitting, 1e-3)


class TestConvergence(unittest.TestCase):
    def test_convergence(self):
        report = convergence_study(spin_scenario(), -1, SPIN_WINDOW, RadialGrid(1e-6, 20.0, 1000))
        self.assertLess(report.shooting_change, 1e-7)
        for ratio in report.ratios:
            self.assertGreater(ratio, 3.2)
            self.assertLess(ratio, 4.8)
        self.assertLess(report.extrapolated_change, report.oracle_changes[0])
        self.assertEqual(
            sorted(report.to_dict()),
            ["extrapolated_change", "oracle_changes", "ratios", "shooting_change"],
        )
