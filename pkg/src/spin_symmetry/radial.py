"""Bound states of the 3D radial Dirac equation with scalar + vector potentials.

With the coupling ``O = gamma0`` the two potential branches are ``V+ =
V_v + V_O`` (on the upper component ``G``) and ``V- = V_v - V_O`` (on the
lower component ``F``). The spin-symmetric case holds ``V-`` constant,
the pseudospin-symmetric one ``V+``.

"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exc import InvalidScenario, SingularDenominator
from .oracle import extrapolate, radial_operator
from .potentials import Constant, make_profile
from .shooting import RadialGrid, RadialSystem, ShootingSolver, count_nodes


__all__ = [
    "ConvergenceReport",
    "Doublet",
    "RadialSolution",
    "SecondOrderTerms",
    "SymmetryScenario",
    "convergence_study",
    "match_doublets",
    "partner_kappa",
    "radial_equations",
    "residual_second_order",
    "schrodinger_oracle",
    "second_order_terms",
    "solve_bound_states",
    "solve_doublets",
    "splitting_scan",
]


log = logging.getLogger(__name__)

BRANCHES = ("spin", "pseudospin", "broken")


class SymmetryScenario:

    """Potential branches for one radial problem.

    ``potential`` is the active branch (``V+`` for spin, ``V-`` for
    pseudospin) and ``constant`` the value of the other one. A
    ``broken`` scenario keeps the branch assignment of its ``parent``
    but adds ``breaking`` to the constant branch.

    """

    def __init__(self, branch, potential, constant, breaking=None, parent=None):
        if branch not in BRANCHES:
            raise InvalidScenario(f"Unknown branch `{branch}`; expected one of {BRANCHES}")
        if branch == "broken":
            if breaking is None:
                raise InvalidScenario("A broken scenario needs a breaking profile")
            if parent not in ("spin", "pseudospin"):
                raise InvalidScenario("A broken scenario needs a spin or pseudospin parent")
        elif breaking is not None:
            raise InvalidScenario(f"A {branch} scenario can't have a breaking profile")
        self.branch = branch
        self.potential = make_profile(potential)
        self.constant = float(constant)
        self.breaking = None if breaking is None else make_profile(breaking)
        self.parent = parent if branch == "broken" else None

    @classmethod
    def broken_from(cls, scenario, shape, amplitude):
        """Break ``scenario`` with ``amplitude * shape`` on its constant branch."""
        return cls(
            "broken",
            scenario.potential,
            scenario.constant,
            amplitude * make_profile(shape),
            scenario.symmetry,
        )

    @property
    def symmetry(self):
        """``spin`` or ``pseudospin`` (the parent's for broken scenarios)."""
        return self.parent or self.branch

    @property
    def exact(self):
        return self.branch != "broken"

    @property
    def constant_branch(self):
        if self.breaking is None:
            return Constant(self.constant)
        return Constant(self.constant) + self.breaking

    @property
    def v_plus(self):
        return self.potential if self.symmetry == "spin" else self.constant_branch

    @property
    def v_minus(self):
        return self.constant_branch if self.symmetry == "spin" else self.potential

    def mirrored(self):
        """Charge-conjugate scenario: ``E -> -E``, ``kappa -> -kappa``.

        Spin symmetry maps to pseudospin symmetry with both branches
        negated.

        """
        branch = {"spin": "pseudospin", "pseudospin": "spin"}
        breaking = None if self.breaking is None else -self.breaking
        return SymmetryScenario(
            self.branch if self.branch == "broken" else branch[self.branch],
            -self.potential,
            -self.constant,
            breaking,
            branch.get(self.parent),
        )

    def to_dict(self):
        return {
            "branch": self.branch,
            "parent": self.parent,
            "potential": self.potential.to_dict(),
            "constant": self.constant,
            "breaking": None if self.breaking is None else self.breaking.to_dict(),
        }

    def __repr__(self):
        return f"<SymmetryScenario {self.branch} {self.potential!r} C={self.constant}>"


def partner_kappa(kappa, symmetry):
    """Doublet partner: ``-kappa - 1`` for spin, ``-kappa + 1`` for pseudospin.

    Returns ``None`` when the partner would be ``kappa = 0``.

    >>> partner_kappa(1, 'spin'), partner_kappa(-2, 'spin')
    (-2, 1)
    >>> partner_kappa(2, 'pseudospin'), partner_kappa(-1, 'pseudospin')
    (-1, 2)
    >>> partner_kappa(-1, 'spin') is None
    True

    """
    partner = -kappa - 1 if symmetry == "spin" else -kappa + 1
    return partner or None


def _check_kappa(kappa):
    if kappa == 0 or int(kappa) != kappa:
        raise InvalidScenario(f"kappa must be a nonzero integer; got {kappa}")
    return int(kappa)


def radial_system(scenario, kappa):
    kappa = _check_kappa(kappa)
    return RadialSystem(-kappa, kappa, scenario.v_plus, scenario.v_minus)


def radial_equations(scenario, kappa, energy, r, G, F):
    """Right-hand sides ``(G', F')`` of the radial equations at ``r``."""
    if np.any(np.asarray(r) <= 0):
        raise InvalidScenario("The radial equations need r > 0")
    return radial_system(scenario, kappa).derivatives(r, energy, G, F)


class RadialSolution:

    """A bound state on a radial grid.

    ``nodes`` counts the nodes of ``G``; ``schrodinger_nodes`` those of
    the Schrödinger-like component (``G`` for spin, ``F`` for
    pseudospin), which doublet partners share.

    """

    def __init__(self, kappa, energy, grid, G, F, symmetry="spin", match_index=None):
        self.kappa = kappa
        self.energy = float(energy)
        self.grid = grid
        self.G = G
        self.F = F
        self.symmetry = symmetry
        self.match_index = match_index
        self.nodes = count_nodes(G)
        self.lower_nodes = count_nodes(F)

    @property
    def schrodinger_nodes(self):
        return self.nodes if self.symmetry == "spin" else self.lower_nodes

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "energy": self.energy,
            "nodes": self.nodes,
            "schrodinger_nodes": self.schrodinger_nodes,
        }

    def __repr__(self):
        return f"<RadialSolution kappa={self.kappa} nodes={self.nodes} E={self.energy:.10g}>"


def solve_bound_states(
    scenario,
    kappa,
    window,
    grid=None,
    scan_points=400,
    tolerance=1e-10,
    match_fraction=0.25,
):
    """Shoot for every bound state in ``window``, sorted by node count."""
    grid = grid or RadialGrid()
    solver = ShootingSolver(
        radial_system(scenario, kappa),
        grid,
        scan_points=scan_points,
        tolerance=tolerance,
        match_fraction=match_fraction,
    )
    solutions = []
    for energy in solver.bound_energies(window):
        G, F = solver.state(energy)
        solutions.append(
            RadialSolution(kappa, energy, grid, G, F, scenario.symmetry, solver.match_index)
        )
    log.info("kappa=%d (%s): %d bound states", kappa, scenario.branch, len(solutions))
    return sorted(solutions, key=lambda s: (s.schrodinger_nodes, s.energy))


# Schrödinger-like oracle


def _oracle_operator(scenario, kappa, grid, points):
    if not scenario.exact:
        raise InvalidScenario("The Schrödinger-like reduction needs exact symmetry")
    kappa = _check_kappa(kappa)
    centrifugal = kappa * (kappa + 1) if scenario.symmetry == "spin" else kappa * (kappa - 1)
    return radial_operator(grid.r_max, points, centrifugal, scenario.potential, scenario.constant)


def schrodinger_oracle(
    scenario,
    kappa,
    window,
    grid=None,
    scan_points=400,
    tolerance=1e-11,
    extrapolate_levels=True,
    accelerate=True,
):
    """Levels of the energy-dependent second-order equation as ``(energy, nodes)``.

    Uses the 3-point Laplacian with ``grid.points`` intervals; by
    default the result is Richardson-extrapolated with a second solve
    at half the spacing.

    """
    grid = grid or RadialGrid()

    def levels(points):
        operator = _oracle_operator(scenario, kappa, grid, points)
        return operator.levels(window, scan_points, tolerance, accelerate=accelerate)

    coarse = levels(grid.points)
    if not extrapolate_levels:
        return coarse
    return extrapolate(coarse, levels(2 * grid.points))


# Second-order equation for the non-Schrödinger component


def _derivatives(values, h):
    """5-point first and second derivatives (interior points only)."""
    f = values
    d1 = np.full_like(f, np.nan)
    d2 = np.full_like(f, np.nan)
    d1[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)
    d2[2:-2] = (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * h**2)
    return d1, d2


class SecondOrderTerms:

    """Terms of the second-order equation for the non-Schrödinger component.

    ``second_derivative`` should equal the sum of ``centrifugal``,
    ``kinetic``, ``spin_orbit`` and ``darwin``. ``mask`` selects the
    points where that's checked; ``excluded_radii`` lists the radii
    where ``E - V`` changes sign.

    """

    def __init__(self, r, second_derivative, centrifugal, kinetic, spin_orbit, darwin, mask):
        self.r = r
        self.second_derivative = second_derivative
        self.centrifugal = centrifugal
        self.kinetic = kinetic
        self.spin_orbit = spin_orbit
        self.darwin = darwin
        self.mask = mask
        self.excluded_radii = []

    @property
    def residual(self):
        return self.second_derivative - (
            self.centrifugal + self.kinetic + self.spin_orbit + self.darwin
        )

    @property
    def scale(self):
        terms = (
            self.second_derivative,
            self.centrifugal,
            self.kinetic,
            self.spin_orbit,
            self.darwin,
        )
        return max(float(np.max(np.abs(t[self.mask]))) for t in terms)

    def relative_residual(self):
        return float(np.max(np.abs(self.residual[self.mask]))) / self.scale


def second_order_terms(sol, scenario, strict=False, band=3, denominator_floor=1e-8):
    """Evaluate the second-order equation on a solved state.

    Spin symmetry (``V-`` constant) gives, for ``F``::

        F'' = k(k-1)/r^2 F - (E - C)(E - V+) F + V+' (k F / r - F') / (E - V+)

    and pseudospin symmetry (``V+`` constant), for ``G``::

        G'' = k(k+1)/r^2 G - (E - C)(E - V-) G - V-' (G' + k G / r) / (E - V-)

    Points within ``band`` of a sign change of ``E - V`` or of the
    matching point are masked out. ``strict=True`` raises at the first
    sign change instead.

    """
    if not scenario.exact:
        raise InvalidScenario("The second-order reduction needs exact symmetry")
    r = sol.grid.r
    h = sol.grid.spacing
    k = sol.kappa
    E = sol.energy
    C = scenario.constant
    V = scenario.potential(r)
    dV = scenario.potential.derivative(r)
    denominator = E - V

    small = np.abs(denominator) < denominator_floor
    if small.any():
        raise SingularDenominator(
            f"|E - V| < {denominator_floor} on the grid", radii=r[small].tolist()
        )
    crossings = np.nonzero(np.diff(np.sign(denominator)) != 0)[0]
    if strict and crossings.size:
        radius = float(r[crossings[0]])
        raise SingularDenominator(f"E - V changes sign near r = {radius:.6g}", radii=[radius])

    if scenario.symmetry == "spin":
        u = sol.F
        d1, d2 = _derivatives(u, h)
        centrifugal = k * (k - 1) * u / r**2
        kinetic = -(E - C) * denominator * u
        spin_orbit = dV * k * u / (r * denominator)
        darwin = -dV * d1 / denominator
    else:
        u = sol.G
        d1, d2 = _derivatives(u, h)
        centrifugal = k * (k + 1) * u / r**2
        kinetic = -(E - C) * denominator * u
        spin_orbit = -dV * k * u / (r * denominator)
        darwin = -dV * d1 / denominator

    mask = np.isfinite(d2)
    excluded = list(crossings)
    if sol.match_index is not None:
        excluded.append(sol.match_index)
    for index in excluded:
        mask[max(index - band, 0) : index + band + 2] = False

    terms = SecondOrderTerms(r, d2, centrifugal, kinetic, spin_orbit, darwin, mask)
    terms.excluded_radii = [float(r[i]) for i in crossings]
    return terms


def residual_second_order(sol, scenario, strict=False):
    """Max residual of the second-order equation relative to its largest term."""
    terms = second_order_terms(sol, scenario, strict=strict)
    if terms.excluded_radii:
        log.info(
            "Second-order residual: excluded points near r = %s",
            ", ".join(f"{r:.4g}" for r in terms.excluded_radii),
        )
    return terms.relative_residual()


# Doublets


class Doublet:

    """Two partner states and their energy splitting."""

    def __init__(self, state, partner):
        self.state = state
        self.partner = partner

    @property
    def splitting(self):
        return abs(self.state.energy - self.partner.energy)

    @property
    def nodes(self):
        return self.state.schrodinger_nodes

    def to_dict(self):
        return {
            "kappa": self.state.kappa,
            "partner_kappa": self.partner.kappa,
            "nodes": self.nodes,
            "energy": self.state.energy,
            "partner_energy": self.partner.energy,
            "splitting": self.splitting,
        }

    def __repr__(self):
        return (
            f"<Doublet kappa={self.state.kappa}/{self.partner.kappa} "
            f"nodes={self.nodes} splitting={self.splitting:.3g}>"
        )


def match_doublets(solutions, partner_solutions):
    """Pair states with partners sharing their Schrödinger-like node count."""
    partners = {s.schrodinger_nodes: s for s in partner_solutions}
    return [
        Doublet(s, partners[s.schrodinger_nodes])
        for s in solutions
        if s.schrodinger_nodes in partners
    ]


def solve_doublets(scenario, kappa, window, grid=None, threads=1, **kwargs):
    """Solve ``kappa`` and its partner channel and pair the states."""
    partner = partner_kappa(kappa, scenario.symmetry)
    if partner is None:
        raise InvalidScenario(f"kappa = {kappa} has no {scenario.symmetry} partner")
    with ThreadPoolExecutor(max_workers=threads) as executor:
        states, partner_states = executor.map(
            lambda k: solve_bound_states(scenario, k, window, grid, **kwargs), (kappa, partner)
        )
    return match_doublets(states, partner_states)


def splitting_scan(
    scenario, shape, amplitudes, kappa, window, grid=None, nodes=None, min_step=1e-3, **kwargs
):
    """Doublet splitting as the symmetry-breaking amplitude grows.

    The doublet with ``nodes`` Schrödinger-like nodes at zero amplitude
    (the one nearest the middle of ``window`` when not given) is followed
    by continuation. A step is accepted when the doublet closest to the
    extrapolated energy keeps the node count; otherwise it is halved, down
    to ``min_step``. Returns ``(amplitude, doublet)`` pairs for
    ``amplitudes`` in the order given.

    """

    def solve(amplitude):
        broken = SymmetryScenario.broken_from(scenario, shape, amplitude)
        return solve_doublets(broken, kappa, window, grid, **kwargs)

    doublets = solve(0.0)
    if nodes is None:
        middle = (window[0] + window[1]) / 2
        tracked = min(doublets, key=lambda d: abs(d.state.energy - middle), default=None)
    else:
        tracked = next((d for d in doublets if d.nodes == nodes), None)
    if tracked is None:
        label = "" if nodes is None else f" with {nodes} nodes"
        raise InvalidScenario(f"No doublet{label} found for kappa = {kappa}")

    amplitude, energy, slope = 0.0, tracked.state.energy, 0.0
    step = np.inf
    series = []
    for target in amplitudes:
        while amplitude != target:
            remaining = abs(target - amplitude)
            step = min(2 * step, remaining)
            trial = target
            if step < remaining:
                trial = amplitude + np.copysign(step, target - amplitude)
            predicted = energy + slope * (trial - amplitude)
            nearest = min(
                solve(trial), key=lambda d: abs(d.state.energy - predicted), default=None
            )
            if nearest is None or nearest.nodes != tracked.nodes:
                if step <= min_step:
                    raise InvalidScenario(
                        f"Doublet with {tracked.nodes} nodes lost at amplitude {trial:g}"
                    )
                log.debug("amplitude %g: doublet not followed; halving the step", trial)
                step /= 4
                continue
            slope = (nearest.state.energy - energy) / (trial - amplitude)
            amplitude, energy, tracked = trial, nearest.state.energy, nearest
        log.debug("amplitude %g: splitting %.3g", amplitude, tracked.splitting)
        series.append((target, tracked))
    return series


# Grid convergence


class ConvergenceReport:

    """Energy changes under mesh refinement.

    ``shooting_change`` is the largest shooting-energy change when the
    spacing is halved. ``oracle_changes`` holds the raw 3-point oracle
    changes for ``h -> h/2`` and ``h/2 -> h/4`` whose ratio should be
    close to 4. ``extrapolated_change`` is the change of the
    Richardson-extrapolated oracle from ``h`` to ``h/2``.

    """

    def __init__(self, shooting_change, oracle_changes, extrapolated_change, ratios):
        self.shooting_change = shooting_change
        self.oracle_changes = oracle_changes
        self.extrapolated_change = extrapolated_change
        self.ratios = ratios

    def to_dict(self):
        return {
            "shooting_change": self.shooting_change,
            "oracle_changes": list(self.oracle_changes),
            "extrapolated_change": self.extrapolated_change,
            "ratios": list(self.ratios),
        }


def convergence_study(scenario, kappa, window, grid=None, scan_points=400):
    grid = grid or RadialGrid()

    def by_nodes(levels):
        return {level.nodes: level.energy for level in levels}

    def largest_change(first, second):
        return max(abs(first[n] - second[n]) for n in set(first) & set(second))

    shooting = [
        {s.schrodinger_nodes: s.energy for s in solve_bound_states(scenario, kappa, window, g)}
        for g in (grid, grid.refined())
    ]

    # The oracle uses grid.points intervals, so these halve h exactly.
    oracle_grids = [RadialGrid(grid.r_min, grid.r_max, grid.points * f) for f in (1, 2, 4)]
    raw = [
        by_nodes(
            schrodinger_oracle(scenario, kappa, window, g, scan_points, extrapolate_levels=False)
        )
        for g in oracle_grids
    ]
    nodes = sorted(set(raw[0]) & set(raw[1]) & set(raw[2]))
    first = np.array([abs(raw[0][n] - raw[1][n]) for n in nodes])
    second = np.array([abs(raw[1][n] - raw[2][n]) for n in nodes])

    extrapolated = [
        by_nodes(schrodinger_oracle(scenario, kappa, window, g, scan_points))
        for g in oracle_grids[:2]
    ]
    return ConvergenceReport(
        largest_change(*shooting),
        (float(first.max()), float(second.max())),
        largest_change(*extrapolated),
        first / second,
    )
