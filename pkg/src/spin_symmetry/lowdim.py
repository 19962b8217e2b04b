"""Bound states of the axial (1D) and planar (2D) weak-condition Hamiltonians.

Axial::

    H1 = alpha_z p_z + i beta alpha_z V_t(z) + V_1v(z)       (O = i beta alpha_z)

Planar, circularly symmetric::

    H2 = alpha_x p_x + alpha_y p_y + alpha_z V_z(rho) + V_2v(rho)   (O = alpha_z)

In both cases ``V+ = V_v + V_O`` and ``V- = V_v - V_O``. The ``plus``
relation (``V_O = V_v + C``) makes ``V- = -C`` constant, the analog of
spin symmetry; ``minus`` (``V_O = -V_v + C``) makes ``V+ = C`` constant,
the analog of pseudospin symmetry.

"""
import logging

import numpy as np
from scipy import sparse
from scipy.linalg import eigh, eigh_tridiagonal

from .clifford import ALPHA, BETA, IDENTITY, SIGMA, anticommutator, commutator, max_abs
from .exc import DoublingDetected, InvalidScenario
from .oracle import extrapolate, planar_operator, staggered_operator, staggered_points
from .potentials import Constant, make_profile
from .shooting import RadialGrid, RadialSystem, ShootingSolver, count_nodes
from .symmetry import PlaneWaveContext, SymmetryReport, build_generators


__all__ = [
    "AxialState",
    "Axial1DProblem",
    "PlanarState",
    "Planar2DProblem",
    "assemble_axial_hamiltonian",
    "axial_oracle",
    "channel_basis",
    "check_weak_symmetry_residuals",
    "oracle_mismatch",
    "partner_m_j",
    "planar_oracle",
    "solve_1d",
    "solve_2d_radial",
    "staggered_dispersion",
]


log = logging.getLogger(__name__)

RELATIONS = ("plus", "minus", "broken")

AXIAL_COUPLING = 1j * BETA @ ALPHA[2]
PLANAR_COUPLING = ALPHA[2]

# Normalized total variation above which an eigenvector is a lattice artifact
DOUBLING_THRESHOLD = 0.5


class _WeakProblem:

    """Shared branch bookkeeping for the axial and planar problems.

    ``coupled`` is the profile multiplying ``O`` (``V_t`` or ``V_z``),
    ``vector`` the one multiplying the identity.

    """

    def __init__(self, coupled, vector, relation, constant, parent=None):
        if relation not in RELATIONS:
            raise InvalidScenario(f"Unknown relation `{relation}`; expected one of {RELATIONS}")
        if relation == "broken":
            parent = parent or "plus"
            if parent not in ("plus", "minus"):
                raise InvalidScenario(f"Broken problems need a plus or minus parent; got {parent}")
        else:
            parent = None
        self.coupled = make_profile(coupled)
        self.vector = make_profile(vector)
        self.relation = relation
        self.constant = float(constant)
        self.parent = parent

    @classmethod
    def from_relation(
        cls, relation, potential, constant, breaking=None, parent="plus", **kwargs
    ):
        """Build the coupled profile from the vector one and the relation."""
        potential = make_profile(potential)
        base = parent if relation == "broken" else relation
        coupled = (potential if base == "plus" else -potential) + Constant(constant)
        if relation == "broken":
            if breaking is None:
                raise InvalidScenario("A broken problem needs a breaking profile")
            coupled = coupled + make_profile(breaking)
        return cls(coupled, potential, relation, constant, parent=parent, **kwargs)

    @property
    def symmetry(self):
        return "spin" if (self.parent or self.relation) == "plus" else "pseudospin"

    @property
    def exact(self):
        return self.relation != "broken"

    @property
    def v_plus(self):
        return self.vector + self.coupled

    @property
    def v_minus(self):
        return self.vector + -self.coupled

    @property
    def active(self):
        """The non-constant branch and the value of the constant one."""
        if self.symmetry == "spin":
            return self.v_plus, -self.constant
        return self.v_minus, self.constant

    def check_relation(self, x):
        """Raise unless ``V_O -+ V_v`` equals ``C`` at every ``x``."""
        if not self.exact:
            return
        sign = -1 if self.relation == "plus" else 1
        deviation = np.max(np.abs(self.coupled(x) + sign * self.vector(x) - self.constant))
        if deviation > 1e-12:
            raise InvalidScenario(
                f"The {self.relation} relation doesn't hold (off by {deviation:.3g})"
            )


# Axial (1D)


class Axial1DProblem(_WeakProblem):

    """``V_t`` and ``V_1v`` on a hard-walled interval ``[-length/2, length/2]``."""

    def __init__(
        self,
        V_t,
        V_1v,
        relation="plus",
        constant=0.0,
        length=20.0,
        points=2000,
        parent=None,
    ):
        super().__init__(V_t, V_1v, relation, constant, parent)
        if length <= 0 or points < 3:
            raise InvalidScenario("The axial grid needs a positive length and at least 3 points")
        self.length = float(length)
        self.points = int(points)
        self.integer, self.half, self.spacing = staggered_points(self.length, self.points)
        self.check_relation(np.concatenate((self.integer, self.half)))

    @property
    def V_t(self):
        return self.coupled

    @property
    def V_1v(self):
        return self.vector

    def exact_counterpart(self):
        if self.exact:
            return self
        return Axial1DProblem.from_relation(
            self.parent, self.vector, self.constant, length=self.length, points=self.points
        )


def channel_basis(O=AXIAL_COUPLING):
    """Spinors ``e_(s,+)`` and ``e_(s,-) = i alpha_z e_(s,+)`` for ``s = +-1``.

    ``e_(s,+-)`` has ``Sigma_z = s`` and ``O = +-1``. Returns the 4x4
    unitary with columns ``e_(+,+), e_(+,-), e_(-,+), e_(-,-)``.

    """
    columns = []
    for s in (1, -1):
        projector = (IDENTITY + s * SIGMA[2]) @ (IDENTITY + O) / 4
        column = projector[:, np.argmax(np.linalg.norm(projector, axis=0))]
        upper = column / np.linalg.norm(column)
        columns.extend((upper, 1j * ALPHA[2] @ upper))
    return np.column_stack(columns)


class AxialState:

    """An axial bound state in one ``Sigma_z`` channel.

    ``upper`` lives on the integer points, ``lower`` on the half points.

    """

    def __init__(self, problem, energy, upper, lower, channel=1):
        self.problem = problem
        self.energy = float(energy)
        self.upper = upper
        self.lower = lower
        self.channel = channel
        self.nodes = count_nodes(upper if problem.symmetry == "spin" else lower)

    def spinor(self, basis=None):
        """4-component spinor on the integer points."""
        basis = channel_basis() if basis is None else basis
        column = 0 if self.channel == 1 else 2
        lower = (self.lower[:-1] + self.lower[1:]) / 2
        return np.outer(basis[:, column], self.upper) + np.outer(basis[:, column + 1], lower)

    def __iter__(self):
        # Unpacks as (energy, nodes, spinor)
        return iter((self.energy, self.nodes, self.spinor()))

    def __repr__(self):
        return f"<AxialState s={self.channel:+d} nodes={self.nodes} E={self.energy:.10g}>"


def staggered_channel_matrix(problem):
    """Interleaved tridiagonal ``(diag, off)`` of one channel.

    The ordering is ``lower_0, upper_0, lower_1, ..., upper_(N-1), lower_N``.

    """
    n = problem.points
    h = problem.spacing
    diag = np.empty(2 * n + 1)
    diag[0::2] = problem.v_minus(problem.half)
    diag[1::2] = problem.v_plus(problem.integer)
    off = np.empty(2 * n)
    off[0::2] = -1 / h
    off[1::2] = 1 / h
    return diag, off


def central_channel_matrix(problem):
    """Dense channel matrix with both components on the integer points."""
    n = problem.points
    h = problem.spacing
    derivative = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2 * h)
    return np.block(
        [
            [np.diag(problem.v_plus(problem.integer)), derivative],
            [derivative.T, np.diag(problem.v_minus(problem.integer))],
        ]
    )


def total_variation(values):
    values = np.asarray(values)
    total = np.sum(np.abs(values))
    return float(np.sum(np.abs(np.diff(values))) / total) if total else 0.0


def solve_1d(problem, window, stencil="staggered", check_doubling=True):
    """Bound states in ``window`` for both ``Sigma_z`` channels, sorted by energy.

    The two channels obey the same equations, so each level appears
    once per channel.

    """
    lo, hi = window
    if not lo < hi:
        raise InvalidScenario(f"Empty energy window {window}")
    n = problem.points
    if stencil == "staggered":
        diag, off = staggered_channel_matrix(problem)
        energies, vectors = eigh_tridiagonal(diag, off, select="v", select_range=(lo, hi))
        uppers, lowers = vectors[1::2].T, vectors[0::2].T
    elif stencil == "central":
        energies, vectors = eigh(central_channel_matrix(problem), subset_by_value=(lo, hi))
        uppers, lowers = vectors[:n].T, vectors[n:].T
        # Pad so the lower component has the staggered length
        lowers = [np.concatenate(([v[0]], v)) for v in lowers]
    else:
        raise InvalidScenario(f"Unknown stencil `{stencil}`")

    states = []
    for energy, upper, lower in zip(energies, uppers, lowers):
        if check_doubling:
            variation = max(total_variation(upper), total_variation(lower))
            if variation > DOUBLING_THRESHOLD:
                raise DoublingDetected(
                    f"Eigenvector at E = {energy:.6g} oscillates on the lattice scale "
                    f"(total variation {variation:.2f}); use the staggered stencil"
                )
        scale = np.sqrt(problem.spacing * (np.sum(upper**2) + np.sum(lower**2)))
        for channel in (1, -1):
            states.append(AxialState(problem, energy, upper / scale, lower / scale, channel))
    log.info("1D (%s, %s): %d levels", problem.relation, stencil, len(energies))
    return states


def axial_oracle(problem, window, scan_points=400, tolerance=1e-11):
    """Levels of the staggered Schrödinger-like operator ``B B^T`` or ``B^T B``."""
    if not problem.exact:
        raise InvalidScenario("The Schrödinger-like reduction needs an exact relation")
    active, constant = problem.active
    component = "upper" if problem.symmetry == "spin" else "lower"
    operator = staggered_operator(problem.length, problem.points, active, constant, component)
    return operator.levels(window, scan_points, tolerance)


def oracle_mismatch(problem, window):
    """Largest ``|E_dirac - E_oracle|`` against the exact-relation oracle, by node count."""
    exact = problem.exact_counterpart()
    oracle = {level.nodes: level.energy for level in axial_oracle(exact, window)}
    states = [s for s in solve_1d(problem, window) if s.channel == 1]
    common = [s for s in states if s.nodes in oracle]
    if not common:
        raise InvalidScenario("No level is shared with the exact-relation oracle")
    return max(abs(s.energy - oracle[s.nodes]) for s in common)


def assemble_axial_hamiltonian(problem):
    """Sparse 4-component ``H1`` in the channel basis.

    Unknowns are ordered ``(+,+), (+,-), (-,+), (-,-)``; ``+`` components
    on the integer points, ``-`` components on the half points.

    """
    n = problem.points
    h = problem.spacing
    basis = channel_basis()
    adjoint = basis.conj().T
    kinetic = adjoint @ ALPHA[2] @ basis
    coupling = adjoint @ AXIAL_COUPLING @ basis
    identity = adjoint @ basis

    B = sparse.diags([np.full(n, -1 / h), np.full(n, 1 / h)], [0, 1], shape=(n, n + 1))
    on_half = [False, True, False, True]
    points = [problem.integer, problem.half, problem.integer, problem.half]
    blocks = [[None] * 4 for _ in range(4)]
    for a in range(4):
        for b in range(4):
            size_a, size_b = len(points[a]), len(points[b])
            if on_half[a] == on_half[b]:
                # Same grid: diagonal potential terms only
                if abs(kinetic[a, b]) > 1e-14:
                    raise InvalidScenario("alpha_z must map + components to - components")
                z = points[a]
                values = coupling[a, b] * problem.V_t(z) + identity[a, b] * problem.V_1v(z)
                block = sparse.diags(values.astype(complex))
            else:
                if max(abs(coupling[a, b]), abs(identity[a, b])) > 1e-14:
                    raise InvalidScenario("O must be diagonal in the channel basis")
                # p_z = -i d/dz between the two grids
                derivative = B if on_half[b] else -B.T
                block = -1j * kinetic[a, b] * derivative
            blocks[a][b] = sparse.csr_matrix(block, shape=(size_a, size_b))
    return sparse.bmat(blocks, format="csr")


def axial_matrix_residuals(problem):
    """``(decoupling, hermiticity)`` of the assembled 4-component matrix."""
    matrix = assemble_axial_hamiltonian(problem)
    half = problem.points + problem.points + 1
    off_block = sparse.vstack((matrix[:half, half:].T, matrix[half:, :half]))
    decoupling = float(abs(off_block).max()) if off_block.nnz else 0.0
    difference = matrix - matrix.conj().T
    hermiticity = float(abs(difference).max()) if difference.nnz else 0.0
    return decoupling, hermiticity


def staggered_dispersion(mass, length, points):
    """Spectrum of the periodic staggered grid with ``V+ = m``, ``V- = -m``.

    Returns:
        (numerical, discrete, continuum): sorted energies from the
            matrix, from ``E^2 = m^2 + (2 sin(k h / 2) / h)^2`` and from
            ``E^2 = m^2 + k^2``

    """
    h = length / points
    B = (np.roll(np.eye(points), 1, axis=1) - np.eye(points)) / h
    matrix = np.block([[mass * np.eye(points), B], [B.T, -mass * np.eye(points)]])
    numerical = np.linalg.eigvalsh(matrix)
    k = 2 * np.pi * np.fft.fftfreq(points, d=h)
    lattice = np.sqrt(mass**2 + (2 * np.sin(k * h / 2) / h) ** 2)
    continuum = np.sqrt(mass**2 + k**2)
    return (
        numerical,
        np.sort(np.concatenate((-lattice, lattice))),
        np.sort(np.concatenate((-continuum, continuum))),
    )


# Planar (2D)


def _m_from_m_j(m_j):
    m = m_j - 0.5
    if m != int(m):
        raise InvalidScenario(f"m_j must be a half-integer; got {m_j}")
    return int(m)


class Planar2DProblem(_WeakProblem):

    """``V_z`` and ``V_2v`` of ``rho`` in the angular channel ``m_j``."""

    def __init__(
        self,
        V_z,
        V_2v,
        relation="plus",
        constant=0.0,
        m_j=0.5,
        grid=None,
        parent=None,
    ):
        super().__init__(V_z, V_2v, relation, constant, parent)
        self.m = _m_from_m_j(m_j)
        self.m_j = float(m_j)
        self.grid = grid or RadialGrid()
        self.check_relation(self.grid.r)

    @property
    def V_z(self):
        return self.coupled

    @property
    def V_2v(self):
        return self.vector

    def with_m_j(self, m_j):
        return Planar2DProblem(
            self.coupled, self.vector, self.relation, self.constant, m_j, self.grid, self.parent
        )

    @property
    def centrifugal_index(self):
        """``nu`` of the Schrödinger-like component: ``|m|`` or ``|m + 1|``."""
        return abs(self.m) if self.symmetry == "spin" else abs(self.m + 1)


def partner_m_j(m_j, symmetry):
    """Partner channel sharing the centrifugal index (``None`` for self-partners).

    >>> partner_m_j(1.5, 'spin'), partner_m_j(0.5, 'pseudospin')
    (-0.5, -1.5)
    >>> partner_m_j(0.5, 'spin') is None
    True

    """
    partner = 1 - m_j if symmetry == "spin" else -m_j - 1
    return None if partner == m_j else partner


class PlanarState:

    """A planar bound state; ``u = f e^(i m theta)``, ``v = i g e^(i (m + 1) theta)``."""

    def __init__(self, problem, energy, f, g):
        self.problem = problem
        self.energy = float(energy)
        self.f = f
        self.g = g
        self.m_j = problem.m_j
        self.nodes = count_nodes(f if problem.symmetry == "spin" else g)

    def spinor(self):
        """4-component spinor at ``theta = 0`` and its ``p_x``, ``p_y`` images.

        The state lives in the ``gamma5 = +1`` subspace, where ``alpha``
        acts as the Pauli matrices.

        """
        rho = self.problem.grid.r
        m = self.problem.m
        df = np.gradient(self.f, rho)
        dg = np.gradient(self.g, rho)
        chi = np.array([self.f, 1j * self.g])
        px_chi = np.array([-1j * df, dg])
        py_chi = np.array([m * self.f / rho, 1j * (m + 1) * self.g / rho])
        lift = np.array([[1, 0], [0, 1], [1, 0], [0, 1]]) / np.sqrt(2)
        return lift @ chi, lift @ px_chi, lift @ py_chi

    def __iter__(self):
        # Unpacks as (energy, nodes, m_j)
        return iter((self.energy, self.nodes, self.m_j))

    def __repr__(self):
        return f"<PlanarState m_j={self.m_j:+g} nodes={self.nodes} E={self.energy:.10g}>"


def planar_system(problem):
    # f = G, g = -F
    return RadialSystem(problem.m, -(problem.m + 1), problem.v_plus, problem.v_minus)


def solve_2d_radial(problem, window, scan_points=400, tolerance=1e-10):
    solver = ShootingSolver(
        planar_system(problem),
        problem.grid,
        scan_points=scan_points,
        tolerance=tolerance,
    )
    states = []
    for energy in solver.bound_energies(window):
        G, F = solver.state(energy)
        states.append(PlanarState(problem, energy, G, -F))
    log.info("2D m_j=%+g (%s): %d bound states", problem.m_j, problem.relation, len(states))
    return states


def planar_oracle(problem, window, scan_points=400, tolerance=1e-11, extrapolate_levels=True):
    """Levels of the energy-dependent cylindrical Schrödinger-like problem."""
    if not problem.exact:
        raise InvalidScenario("The Schrödinger-like reduction needs an exact relation")
    active, constant = problem.active
    grid = problem.grid

    def levels(points):
        operator = planar_operator(
            grid.r_max, points, problem.centrifugal_index, active, constant
        )
        return operator.levels(window, scan_points, tolerance)

    coarse = levels(grid.points)
    if not extrapolate_levels:
        return coarse
    return extrapolate(coarse, levels(2 * grid.points))


def weak_generator(p=(1.0, 0.0, 0.0)):
    """``S_z`` for ``O = alpha_z`` at an in-plane momentum; equals ``gamma5``."""
    ctx = PlaneWaveContext(p, 0.0, 0.0, PLANAR_COUPLING, "spin", "alpha3")
    return build_generators(ctx)[2]


def planar_symbol_residual(problem, seed=0, samples=10):
    """Largest ``|[H2(p, rho), S_z]|`` over grid points and random in-plane momenta."""
    rng = np.random.default_rng(seed)
    generator = weak_generator()
    rho = problem.grid.r
    V_z, V_2v = problem.V_z(rho), problem.V_2v(rho)
    worst = 0.0
    for px, py in rng.uniform(-2, 2, size=(samples, 2)):
        kinetic = commutator(px * ALPHA[0] + py * ALPHA[1], generator)
        for a, b in ((V_z.min(), V_2v.min()), (V_z.max(), V_2v.max())):
            local = kinetic + commutator(a * ALPHA[2] + b * IDENTITY, generator)
            worst = max(worst, max_abs(local))
    return worst


def _planar_state_residual(state, generator):
    """``max |[H2, generator] psi| / max |psi|`` on one state."""
    psi, px_psi, py_psi = state.spinor()
    rho = state.problem.grid.r
    V_z = state.problem.V_z(rho)
    V_2v = state.problem.V_2v(rho)
    result = (
        commutator(ALPHA[0], generator) @ px_psi
        + commutator(ALPHA[1], generator) @ py_psi
        + (commutator(ALPHA[2], generator) @ psi) * V_z
        + (commutator(IDENTITY, generator) @ psi) * V_2v
    )
    return float(np.max(np.abs(result)) / np.max(np.abs(psi)))


def _axial_state_residual(state, transverse_momentum):
    """``max |sum_i {O, alpha_i} p_i psi| / max |psi|`` with ``p_x = k_x``."""
    psi = state.spinor()
    pz_psi = -1j * np.gradient(psi, state.problem.integer, axis=1)
    result = anticommutator(AXIAL_COUPLING, ALPHA[2]) @ pz_psi
    if transverse_momentum:
        result = result + transverse_momentum * anticommutator(AXIAL_COUPLING, ALPHA[0]) @ psi
    return float(np.max(np.abs(result)) / np.max(np.abs(psi)))


def check_weak_symmetry_residuals(
    problem,
    window,
    states=None,
    transverse_momentum=0.0,
    tolerance=1e-8,
    generator_tolerance=1e-10,
    hermiticity_tolerance=1e-14,
):
    """Check the weak-condition symmetry on computed eigenstates.

    Axial problems: ``{O, alpha.p} psi = 0`` on every state (a
    transverse momentum ``k_x`` breaks it), plus the channel decoupling
    and Hermiticity of the assembled matrix.

    Planar problems: ``lambda.p psi = 0`` (no ``z`` dependence) and
    ``[H2, S_z] psi = 0`` where ``S_z = Sigma_z alpha_z`` is the residual
    U(1) generator. The bare ``Sigma_z`` residual is informational.

    """
    if isinstance(problem, Axial1DProblem):
        states = solve_1d(problem, window) if states is None else states
        decoupling, hermiticity = axial_matrix_residuals(problem)
        anticommutators = (_axial_state_residual(s, transverse_momentum) for s in states)
        residuals = {
            "anticommutator": max(anticommutators, default=0.0),
            "decoupling": decoupling,
            "hermiticity": hermiticity,
        }
        return SymmetryReport(
            "i*beta*alpha3",
            problem.relation,
            (transverse_momentum, 0.0, 0.0),
            None,
            problem.constant,
            residuals,
            tolerance,
            limits={"decoupling": hermiticity_tolerance, "hermiticity": hermiticity_tolerance},
        )
    if isinstance(problem, Planar2DProblem):
        states = solve_2d_radial(problem, window) if states is None else states
        generator = weak_generator()
        residuals = {
            "momentum": 0.0,
            "generator": max((_planar_state_residual(s, generator) for s in states), default=0.0),
            "symbol": planar_symbol_residual(problem),
            "sigma3": max((_planar_state_residual(s, SIGMA[2]) for s in states), default=0.0),
        }
        return SymmetryReport(
            "alpha3",
            problem.relation,
            (0.0, 0.0, 0.0),
            None,
            problem.constant,
            residuals,
            generator_tolerance,
            informational=("sigma3",),
        )
    raise TypeError(f"Expected an axial or planar problem; got {type(problem).__name__}")
