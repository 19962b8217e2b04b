"""Energy-dependent Schrödinger-like eigenproblems.

At exact spin or pseudospin symmetry the Schrödinger-like component
``u`` obeys::

    T u + (E - c) V u = (E - c) E u

where ``T`` is a discretized ``-d^2/dr^2`` plus centrifugal term, ``V``
the active potential branch and ``c`` the constant one. For a frozen
``E`` the left side is a symmetric tridiagonal matrix ``A(E)``; a level
with ``n`` nodes is a fixed point of::

    E = g(E) = lambda_n(A(E)) / (E - c)

Levels are bracketed by counting eigenvalues of ``A(E)`` below ``(E -
c) E`` over a scan of the window and refined with Wegstein's method.

The radial operators end on the decaying tail of the problem with its
coefficients frozen at the outer edge instead of a wall. The tail
depends on ``E`` through ``k^2 = (E - c) (V - E)``.

"""
import logging

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import kve

from .exc import InvalidScenario, IterationDiverged


__all__ = [
    "OracleLevel",
    "TridiagonalOperator",
    "bessel_k_ratio",
    "extrapolate",
    "planar_operator",
    "radial_operator",
    "staggered_operator",
]


log = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class OracleLevel:

    def __init__(self, energy, nodes, iterations=0):
        self.energy = float(energy)
        self.nodes = int(nodes)
        self.iterations = iterations

    def __iter__(self):
        # Unpacks as (energy, nodes)
        return iter((self.energy, self.nodes))

    def __repr__(self):
        return f"OracleLevel(energy={self.energy!r}, nodes={self.nodes})"


class TridiagonalOperator:

    """``A(E) = T + (E - c) V`` with ``T`` given by its two diagonals.

    ``tail`` maps the decay constant ``k`` of the outer region to the
    coupling of the last point to its ghost neighbour; without it the
    ghost value is zero.

    """

    def __init__(self, diag, off, potential, constant, tail=None):
        self.diag = np.asarray(diag, dtype=float)
        self.off = np.asarray(off, dtype=float)
        self.potential = np.asarray(potential, dtype=float)
        self.constant = float(constant)
        self.tail = tail

    @property
    def size(self):
        return self.diag.size

    def shifted(self, energy):
        d = self.diag + (energy - self.constant) * self.potential
        if self.tail is not None:
            k2 = (energy - self.constant) * (self.potential[-1] - energy)
            if k2 > 0:
                d[-1] += self.tail(np.sqrt(k2))
        return d

    def norm(self, energy):
        d = self.shifted(energy)
        return float(np.max(np.abs(d)) + 2 * np.max(np.abs(self.off), initial=0.0))

    def eigenvalue(self, energy, n):
        """The ``n``-th (0-based) eigenvalue of ``A(E)``."""
        values = eigvalsh_tridiagonal(
            self.shifted(energy), self.off, select="i", select_range=(n, n)
        )
        return float(values[0])

    def count_below(self, energy):
        """Number of eigenvalues of ``A(E)`` below ``(E - c) E``."""
        d = self.shifted(energy)
        target = (energy - self.constant) * energy
        radius = np.abs(np.concatenate(([0.0], self.off))) + np.abs(
            np.concatenate((self.off, [0.0]))
        )
        lower = float(np.min(d - radius)) - 1.0
        if target <= lower:
            return 0
        values = eigvalsh_tridiagonal(d, self.off, select="v", select_range=(lower, target))
        return int(values.size)

    def fixed_point_map(self, energy, n):
        return self.eigenvalue(energy, n) / (energy - self.constant)

    def resolution(self, energy):
        """Noise floor of ``g(E)`` from the eigenvalue round-off."""
        return 8 * EPS * self.norm(energy) / abs(energy - self.constant)

    # Level search

    def levels(
        self,
        window,
        scan_points=400,
        tolerance=1e-11,
        max_iterations=200,
        accelerate=True,
    ):
        """Return every level in ``window`` as :class:`OracleLevel` s.

        With ``accelerate=False`` the plain iteration ``E <- g(E)`` is
        used from the middle of each bracket; it leaves the window (and
        raises :class:`IterationDiverged`) wherever ``|g'| > 1``.

        """
        lo, hi = window
        if not lo < hi:
            raise InvalidScenario(f"Empty energy window {window}")
        if lo <= self.constant <= hi:
            raise InvalidScenario(
                f"Energy window {window} contains the constant branch {self.constant}"
            )
        energies = np.linspace(lo, hi, scan_points)
        counts = [self.count_below(e) for e in energies]
        brackets = []
        for a, b, ca, cb in zip(energies, energies[1:], counts, counts[1:]):
            brackets.extend(self._split(a, b, ca, cb, tolerance))
        log.debug("Oracle scan of %s: %d brackets", tuple(window), len(brackets))
        levels = []
        for a, b, n in brackets:
            if accelerate:
                level = self._wegstein(a, b, n, tolerance, max_iterations)
            else:
                level = self._iterate((a + b) / 2, n, window, tolerance, max_iterations)
            levels.append(level)
        return sorted(levels, key=lambda level: level.energy)

    def _split(self, a, b, ca, cb, tolerance):
        """Subdivide until each bracket holds a single level."""
        if ca == cb:
            return []
        if abs(ca - cb) == 1 or b - a < tolerance:
            return [(a, b, min(ca, cb))]
        mid = (a + b) / 2
        cm = self.count_below(mid)
        return self._split(a, mid, ca, cm, tolerance) + self._split(mid, b, cm, cb, tolerance)

    def _residual(self, energy, n):
        g = self.fixed_point_map(energy, n)
        if not np.isfinite(g):
            raise IterationDiverged(f"Non-finite fixed-point map at E = {energy}")
        return g - energy, g

    def _wegstein(self, a, b, n, tolerance, max_iterations):
        f_a, _ = self._residual(a, n)
        f_b, g_b = self._residual(b, n)
        x_prev, g_prev = a, a + f_a
        x, g = b, g_b
        for iteration in range(1, max_iterations + 1):
            if abs(x - g) <= self.resolution(x):
                return OracleLevel(x, n, iteration)
            slope = (g - g_prev) / (x - x_prev)
            if slope == 1:
                x_new = (a + b) / 2
            else:
                q = slope / (slope - 1)
                x_new = q * x + (1 - q) * g
            if not a < x_new < b:
                x_new = (a + b) / 2
            f_new, g_new = self._residual(x_new, n)
            # Keep the root bracketed
            if np.sign(f_new) == np.sign(f_a):
                a, f_a = x_new, f_new
            else:
                b, f_b = x_new, f_new
            if abs(x_new - x) < tolerance:
                return OracleLevel(x_new, n, iteration)
            x_prev, g_prev = x, g
            x, g = x_new, g_new
        raise IterationDiverged(
            f"No fixed point for level {n} after {max_iterations} iterations (last E = {x})"
        )

    def _iterate(self, x, n, window, tolerance, max_iterations):
        lo, hi = window
        for iteration in range(1, max_iterations + 1):
            _, g = self._residual(x, n)
            if not lo <= g <= hi:
                raise IterationDiverged(
                    f"Fixed-point iteration for level {n} left the window {window} (E = {g})"
                )
            if abs(g - x) < tolerance or abs(g - x) <= self.resolution(x):
                return OracleLevel(g, n, iteration)
            x = g
        raise IterationDiverged(
            f"No fixed point for level {n} after {max_iterations} iterations (last E = {x})"
        )


# Operators


def bessel_k_ratio(order, k, r_out, r_in):
    """``K_order(k r_out) / K_order(k r_in)`` without overflow."""
    return kve(order, k * r_out) / kve(order, k * r_in) * np.exp(-k * (r_out - r_in))


def radial_operator(r_max, points, centrifugal, potential, constant):
    """3-point ``-d^2/dr^2 + l(l+1)/r^2`` on ``r_i = i h``.

    ``u(0) = 0``; past the last point ``u`` continues as ``sqrt(r)
    K_(l+1/2)(k r)``.

    """
    h = r_max / points
    r = h * np.arange(1, points)
    diag = 2 / h**2 + centrifugal / r**2
    off = np.full(points - 2, -1 / h**2)
    order = np.sqrt(centrifugal + 0.25)

    def tail(k):
        ratio = np.sqrt(r_max / r[-1]) * bessel_k_ratio(order, k, r_max, r[-1])
        return -ratio / h**2

    return TridiagonalOperator(diag, off, potential(r), constant, tail)


def planar_operator(r_max, points, nu, potential, constant):
    """Symmetric finite-volume ``-(1/r)(r u')' + nu^2/r^2 u`` on cell centres.

    The mass matrix ``r_i h`` is folded in symmetrically, so the
    eigenvalues are those of the cylindrical operator. Past the last
    cell ``u`` continues as ``K_nu(k r)``.

    """
    h = r_max / points
    centres = h * (np.arange(points) + 0.5)
    faces = h * np.arange(points + 1)
    diag = (faces[1:] + faces[:-1]) / (h**2 * centres) + nu**2 / centres**2
    off = -faces[1:-1] / (h**2 * np.sqrt(centres[:-1] * centres[1:]))
    last = centres[-1]

    def tail(k):
        return -faces[-1] * bessel_k_ratio(nu, k, last + h, last) / (h**2 * last)

    return TridiagonalOperator(diag, off, potential(centres), constant, tail)


def staggered_points(length, points):
    """Integer and half points of the symmetric staggered 1D grid."""
    h = length / (points + 1)
    integer = -length / 2 + h * np.arange(1, points + 1)
    half = -length / 2 + h * (np.arange(points + 1) + 0.5)
    return integer, half, h


def staggered_operator(length, points, potential, constant, component="upper"):
    """``B B^T`` (upper, integer points) or ``B^T B`` (lower, half points)."""
    integer, half, h = staggered_points(length, points)
    if component == "upper":
        diag = np.full(points, 2 / h**2)
        off = np.full(points - 1, -1 / h**2)
        z = integer
    elif component == "lower":
        diag = np.full(points + 1, 2 / h**2)
        diag[0] = diag[-1] = 1 / h**2
        off = np.full(points, -1 / h**2)
        z = half
    else:
        raise ValueError(f"component must be upper or lower; got {component}")
    return TridiagonalOperator(diag, off, potential(z), constant)


def extrapolate(coarse, fine):
    """Richardson-extrapolate levels of an ``h^2`` accurate operator.

    Levels are matched by node count; unmatched ones are dropped.

    """
    by_nodes = {level.nodes: level for level in fine}
    levels = []
    for level in coarse:
        partner = by_nodes.get(level.nodes)
        if partner is not None:
            energy = (4 * partner.energy - level.energy) / 3
            levels.append(OracleLevel(energy, level.nodes, level.iterations + partner.iterations))
    return levels
