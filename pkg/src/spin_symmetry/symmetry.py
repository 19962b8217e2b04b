"""Projectors, plane-wave Hamiltonians and the SU(2) generators.

Everything is evaluated at a single point in momentum space: ``p`` is a
real 3-vector, the active branch of the potential is the number ``V``
and the constant branch is ``C``.

"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import expm

from .clifford import (
    BETA,
    EPSILON,
    GAMMA5,
    IDENTITY,
    SIGMA,
    TOLERANCE,
    commutator,
    dot_alpha,
    enumerate_strict_candidates,
    max_abs,
)
from .exc import InvalidCoupling, InvalidScenario, ZeroMomentum


__all__ = [
    "GeneratorSet",
    "PlaneWaveContext",
    "SymmetryReport",
    "build_generators",
    "build_hamiltonian",
    "build_projectors",
    "finite_rotation",
    "plane_wave_dispersion",
    "random_contexts",
    "rotation_residual",
    "verify_commutation",
    "verify_context",
    "verify_su2",
    "verify_sweep",
]


log = logging.getLogger(__name__)

BRANCHES = ("spin", "pseudospin")

# gamma5 must visibly fail to commute with the Hamiltonian.
CONTROL_THRESHOLD = 0.1


class PlaneWaveContext:

    """Momentum, potential values and coupling for one plane wave.

    For the spin branch ``V`` is the value of ``V+`` and ``C`` the
    constant ``V-``; for the pseudospin branch ``V`` is ``V-`` and
    ``C`` the constant ``V+``.

    """

    def __init__(self, p, V, C, O, branch="spin", candidate=None):
        if branch not in BRANCHES:
            raise InvalidScenario(f"Unknown branch `{branch}`; expected one of {BRANCHES}")
        self.p = np.asarray(p, dtype=float)
        self.V = float(V)
        self.C = float(C)
        self.O = np.asarray(O, dtype=complex)
        self.branch = branch
        self.candidate = candidate

    @property
    def p_squared(self):
        return float(np.dot(self.p, self.p))

    def with_branch(self, branch):
        return PlaneWaveContext(self.p, self.V, self.C, self.O, branch, self.candidate)

    def __repr__(self):
        return (
            f"<PlaneWaveContext {self.candidate or 'O'} {self.branch} "
            f"p={self.p.tolist()} V={self.V} C={self.C}>"
        )


class GeneratorSet:

    """``S_i`` for one context, plus the ``s_i`` they are built from."""

    def __init__(self, components, s_matrices):
        self.components = tuple(components)
        self.s_matrices = tuple(s_matrices)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]


class SymmetryReport:

    """Residuals of the symmetry checks for one context.

    ``passed`` is true when every residual is at most its limit:
    ``limits[name]`` if given, else ``tolerance``. Residuals named in
    ``informational`` are reported but not checked.

    """

    def __init__(
        self,
        candidate,
        branch,
        p,
        V,
        C,
        residuals,
        tolerance=TOLERANCE,
        informational=(),
        limits=None,
    ):
        self.candidate = candidate
        self.branch = branch
        self.p = [float(c) for c in p]
        self.V = V
        self.C = C
        self.residuals = dict(residuals)
        self.tolerance = tolerance
        self.informational = tuple(informational)
        self.limits = dict(limits or {})

    @property
    def passed(self):
        return all(
            value <= self.limits.get(name, self.tolerance)
            for name, value in self.residuals.items()
            if name not in self.informational
        )

    @property
    def max_residual(self):
        checked = [v for k, v in self.residuals.items() if k not in self.informational]
        return max(checked, default=0.0)

    def merged(self, other):
        residuals = dict(self.residuals)
        residuals.update(other.residuals)
        limits = dict(self.limits)
        limits.update(other.limits)
        return SymmetryReport(
            self.candidate,
            self.branch,
            self.p,
            self.V,
            self.C,
            residuals,
            self.tolerance,
            self.informational + other.informational,
            limits,
        )

    def to_dict(self):
        return {
            "candidate": self.candidate,
            "branch": self.branch,
            "p": self.p,
            "V": self.V,
            "C": self.C,
            "residuals": dict(sorted(self.residuals.items())),
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def __repr__(self):
        status = "pass" if self.passed else "FAIL"
        return f"<SymmetryReport {self.candidate} {self.branch} {status} {self.max_residual:.3g}>"


def build_projectors(O, tolerance=TOLERANCE):
    """Return ``(P+, P-) = ((I + O)/2, (I - O)/2)``."""
    O = np.asarray(O, dtype=complex)
    residual = max_abs(O @ O - IDENTITY)
    if residual > tolerance:
        raise InvalidCoupling(f"O must square to I (max |O^2 - I| = {residual:.3g})")
    return (IDENTITY + O) / 2, (IDENTITY - O) / 2


def _branch_projectors(ctx):
    """Return ``(active, constant)`` projectors for the context's branch."""
    p_plus, p_minus = build_projectors(ctx.O)
    if ctx.branch == "spin":
        return p_plus, p_minus
    return p_minus, p_plus


def build_hamiltonian(ctx):
    """``alpha.p + V P_active + C P_constant``."""
    active, constant = _branch_projectors(ctx)
    return dot_alpha(ctx.p) + ctx.V * active + ctx.C * constant


def build_generators(ctx):
    """``S_i = Sigma_i P_active + s_i P_constant`` with ``s_i = (a.p) Sigma_i (a.p) / p^2``."""
    p_squared = ctx.p_squared
    if p_squared == 0:
        raise ZeroMomentum("The generators are undefined at p = 0")
    active, constant = _branch_projectors(ctx)
    alpha_p = dot_alpha(ctx.p)
    s_matrices = [alpha_p @ sigma @ alpha_p / p_squared for sigma in SIGMA]
    components = [sigma @ active + s @ constant for sigma, s in zip(SIGMA, s_matrices)]
    return GeneratorSet(components, s_matrices)


def _su2_residual(matrices):
    worst = 0.0
    for i, j, k, sign in EPSILON:
        lhs = commutator(matrices[i], matrices[j])
        worst = max(worst, max_abs(lhs - 2j * sign * matrices[k]))
    return worst


def verify_commutation(ctx, tolerance=TOLERANCE):
    """Check ``[H, S_i] = 0`` along with the partial terms of its proof.

    The partial terms are the kinetic ``[alpha.p, S_i]``, the active
    branch ``[V P_active, S_i]`` and the constant branch ``[C
    P_constant, S_i]``. ``projector`` is the largest violation of the
    projector identities and ``intertwining`` that of ``P+ alpha.p =
    alpha.p P-``.

    """
    active, constant = _branch_projectors(ctx)
    hamiltonian = build_hamiltonian(ctx)
    generators = build_generators(ctx)
    alpha_p = dot_alpha(ctx.p)
    p_plus, p_minus = build_projectors(ctx.O, tolerance)

    def worst(term):
        return max(max_abs(commutator(term, s)) for s in generators)

    residuals = {
        "commutator": worst(hamiltonian),
        "kinetic": worst(alpha_p),
        "active": worst(ctx.V * active),
        "constant": worst(ctx.C * constant),
        "projector": max(
            max_abs(p_plus @ p_plus - p_plus),
            max_abs(p_minus @ p_minus - p_minus),
            max_abs(p_plus @ p_minus),
            max_abs(p_plus + p_minus - IDENTITY),
        ),
        "intertwining": max_abs(p_plus @ alpha_p - alpha_p @ p_minus),
    }
    return SymmetryReport(ctx.candidate, ctx.branch, ctx.p, ctx.V, ctx.C, residuals, tolerance)


def verify_su2(ctx, tolerance=TOLERANCE):
    """Check ``[S_i, S_j] = 2i eps_ijk S_k`` (and the same for ``s_i``)."""
    generators = build_generators(ctx)
    residuals = {
        "su2": _su2_residual(generators.components),
        "s_algebra": _su2_residual(generators.s_matrices),
        "squares": max(
            max_abs(m @ m - IDENTITY)
            for m in itertools.chain(generators.components, generators.s_matrices)
        ),
        "hermiticity": max(max_abs(m - m.conj().T) for m in generators.components),
    }
    return SymmetryReport(ctx.candidate, ctx.branch, ctx.p, ctx.V, ctx.C, residuals, tolerance)


def dispersion_roots(ctx):
    """Roots of ``(E - C)(E - V) = p^2``, each listed twice, ascending."""
    centre = (ctx.C + ctx.V) / 2
    half_gap = np.sqrt(((ctx.C - ctx.V) / 2) ** 2 + ctx.p_squared)
    return np.array([centre - half_gap] * 2 + [centre + half_gap] * 2)


def plane_wave_dispersion(ctx, tolerance=1e-10):
    """Compare the eigenvalues of ``H(p)`` with the dispersion roots.

    Returns:
        (eigenvalues, roots, residual, doubled): ``doubled`` tells
            whether every eigenvalue has even multiplicity

    """
    eigenvalues = np.linalg.eigvalsh(build_hamiltonian(ctx))
    roots = dispersion_roots(ctx)
    residual = float(np.max(np.abs(eigenvalues - roots)))
    doubled = bool(
        abs(eigenvalues[0] - eigenvalues[1]) <= tolerance
        and abs(eigenvalues[2] - eigenvalues[3]) <= tolerance
    )
    return eigenvalues, roots, residual, doubled


def finite_rotation(ctx, epsilon):
    """``exp(epsilon.S / 2i)``."""
    generators = build_generators(ctx)
    exponent = sum(e * s for e, s in zip(epsilon, generators))
    return expm(exponent / 2j)


def rotation_residual(ctx, epsilon):
    """Largest ``|H U psi - E U psi|`` over the eigenspinors of ``H``."""
    hamiltonian = build_hamiltonian(ctx)
    rotation = finite_rotation(ctx, epsilon)
    energies, vectors = np.linalg.eigh(hamiltonian)
    rotated = rotation @ vectors
    return max_abs(hamiltonian @ rotated - rotated * energies)


def verify_context(ctx, epsilon=(0.3, -0.2, 0.5), tolerances=None):
    """Run every plane-wave check for one context and merge the reports.

    ``tolerances`` maps ``exact``, ``dispersion`` and ``rotation`` to
    their limits; the floating-point dispersion and rotation checks
    get the looser ones.

    """
    tolerances = tolerances or {}
    exact = tolerances.get("exact", TOLERANCE)
    report = verify_commutation(ctx, exact).merged(verify_su2(ctx, exact))
    eigenvalues, _, dispersion, _ = plane_wave_dispersion(ctx)
    loose = {
        "dispersion": tolerances.get("dispersion", 1e-10),
        "doublet": tolerances.get("dispersion", 1e-10),
        "rotation": tolerances.get("rotation", 1e-10),
    }
    extra = SymmetryReport(
        ctx.candidate,
        ctx.branch,
        ctx.p,
        ctx.V,
        ctx.C,
        {
            "dispersion": dispersion,
            "doublet": float(
                max(eigenvalues[1] - eigenvalues[0], eigenvalues[3] - eigenvalues[2])
            ),
            "rotation": rotation_residual(ctx, epsilon),
        },
        exact,
        limits=loose,
    )
    return report.merged(extra)


def random_contexts(seed, count=100, span=2.0, O=None, branch="spin", candidate=None):
    """Draw ``count`` contexts with ``p``, ``V`` and ``C`` uniform in ``[-span, span]``."""
    rng = np.random.default_rng(seed)
    O = BETA if O is None else O
    contexts = []
    for _ in range(count):
        p = rng.uniform(-span, span, size=3)
        V, C = rng.uniform(-span, span, size=2)
        contexts.append(PlaneWaveContext(p, V, C, O, branch, candidate))
    return contexts


class SweepResult:

    """Reports for every (candidate, branch, context) plus the gamma5 control."""

    def __init__(self, reports, candidates, control):
        self.reports = reports
        self.candidates = candidates
        self.control = control

    @property
    def passed(self):
        return all(r.passed for r in self.reports) and self.control > CONTROL_THRESHOLD

    def max_residuals(self):
        worst = {}
        for report in self.reports:
            for name, value in report.residuals.items():
                worst[name] = max(worst.get(name, 0.0), value)
        return dict(sorted(worst.items()))


def verify_sweep(
    seed,
    count=100,
    span=2.0,
    epsilon=(0.3, -0.2, 0.5),
    tolerances=None,
    threads=1,
):
    """Verify every strict candidate on both branches over random contexts.

    The same seeded samples are used for every candidate and branch.
    ``gamma5`` (involutory and Hermitian but commuting with alpha) is
    run as a control; its commutator residual must exceed
    ``CONTROL_THRESHOLD``.

    """
    candidates = enumerate_strict_candidates()
    contexts = []
    for element in candidates:
        for branch in BRANCHES:
            contexts.extend(
                random_contexts(seed, count, span, element.matrix, branch, element.name)
            )
    log.debug("Verifying %d plane-wave contexts", len(contexts))
    with ThreadPoolExecutor(max_workers=threads) as executor:
        reports = list(executor.map(lambda c: verify_context(c, epsilon, tolerances), contexts))
    control = min(
        verify_commutation(ctx).residuals["commutator"]
        for ctx in random_contexts(seed, count, span, GAMMA5, "spin", "gamma5")
    )
    log.debug("gamma5 control: smallest commutator residual %.3g", control)
    return SweepResult(reports, [e.name for e in candidates], control)
