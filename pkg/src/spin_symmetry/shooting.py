"""Shooting solver for coupled first-order radial systems.

The systems solved here have the form::

    G' = (a / r) G + (E - V-(r)) F
    F' = (b / r) F - (E - V+(r)) G

which covers the 3D radial Dirac equation (``a = -kappa``, ``b =
kappa``) and the circularly symmetric planar one (``a = m``, ``b = -(m +
1)``).

Solutions are integrated outward from ``r_min`` with the regular power
law start and inward from ``r_max`` with the decaying modified Bessel
function of the problem with its coefficients frozen at ``r_max``. The
normalized Wronskian of the two at a fixed matching radius vanishes at
bound-state energies. It's scanned over the energy window (all scan
energies integrated in one stacked ODE solve) and sign changes are
refined by bisection.

"""
import logging

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.special import kve

from .exc import InvalidScenario, NoStateFound, SolverError, TurningPointOutsideGrid


__all__ = [
    "RadialGrid",
    "RadialSystem",
    "ShootingSolver",
    "count_nodes",
]


log = logging.getLogger(__name__)


class RadialGrid:

    """Uniform mesh on ``[r_min, r_max]``.

    >>> grid = RadialGrid(1e-6, 20.0, 4001)
    >>> grid.refined().points
    8001
    >>> round(grid.refined().spacing / grid.spacing, 12)
    0.5

    """

    def __init__(self, r_min=1e-6, r_max=20.0, points=4000):
        if not 0 <= r_min < r_max:
            raise InvalidScenario(
                f"Bad radial grid: need 0 <= r_min < r_max; got {r_min}, {r_max}"
            )
        if points < 3:
            raise InvalidScenario(f"Radial grid needs at least 3 points; got {points}")
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        self.points = int(points)
        self.r = np.linspace(self.r_min, self.r_max, self.points)

    @property
    def spacing(self):
        return (self.r_max - self.r_min) / (self.points - 1)

    def refined(self, factor=2):
        """Same interval with the spacing divided by ``factor``."""
        return RadialGrid(self.r_min, self.r_max, (self.points - 1) * factor + 1)

    def index_of(self, r):
        return int(np.argmin(np.abs(self.r - r)))

    def to_dict(self):
        return {"r_min": self.r_min, "r_max": self.r_max, "points": self.points}

    def __eq__(self, other):
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"RadialGrid({self.r_min}, {self.r_max}, {self.points})"


class RadialSystem:

    """Coefficients ``a``, ``b`` and the two potential branches."""

    def __init__(self, a, b, v_plus, v_minus):
        self.a = a
        self.b = b
        self.v_plus = v_plus
        self.v_minus = v_minus

    @property
    def breakpoints(self):
        return tuple(sorted(set(self.v_plus.breakpoints + self.v_minus.breakpoints)))

    def derivatives(self, r, energy, G, F):
        dG = (self.a / r) * G + (energy - self.v_minus(r)) * F
        dF = (self.b / r) * F - (energy - self.v_plus(r)) * G
        return dG, dF

    def q(self, energy, r):
        """``(E - V-)(E - V+)``; negative in classically forbidden regions."""
        return (energy - self.v_minus(r)) * (energy - self.v_plus(r))

    def q_asymptotic(self, energy):
        energy = np.asarray(energy, dtype=float)
        with np.errstate(invalid="ignore"):
            q = (energy - self.v_minus.asymptote) * (energy - self.v_plus.asymptote)
        # inf * 0 means the energy sits at an infinite wall
        return np.where(np.isnan(q), -np.inf, q)

    def outward_start(self, energy, r):
        """Regular solution near the origin, to first order."""
        energy = np.asarray(energy, dtype=float)
        ones = np.ones_like(energy)
        if self.a >= 0:
            G = ones * r**self.a
            F = -(energy - self.v_plus(r)) / (self.a + 1 - self.b) * r ** (self.a + 1)
        else:
            F = ones * r**self.b
            G = (energy - self.v_minus(r)) / (self.b + 1 - self.a) * r ** (self.b + 1)
        return G, F

    def inward_start(self, energy, r):
        """Decaying solution at ``r`` with the coefficients frozen there.

        With constant potentials ``G = r^c K_nu(k r)`` exactly, where
        ``c = (a + b + 1) / 2``, ``nu = |a - b - 1| / 2`` and ``k^2 = -q``.

        """
        energy = np.asarray(energy, dtype=float)
        k = np.sqrt(-self.q(energy, r))
        c = (self.a + self.b + 1) / 2
        nu = abs(self.a - self.b - 1) / 2
        z = k * r
        # K_nu' = -(K_(nu-1) + K_(nu+1)) / 2; the exponential scaling cancels
        log_derivative = c / r - k * (kve(nu - 1, z) + kve(nu + 1, z)) / (2 * kve(nu, z))
        G = np.ones_like(energy)
        F = (log_derivative - self.a / r) / (energy - self.v_minus(r))
        return G, F


def count_nodes(values, threshold=1e-8):
    """Count sign changes, ignoring values below ``threshold * max |values|``."""
    values = np.asarray(values)
    scale = np.max(np.abs(values)) if values.size else 0.0
    significant = values[np.abs(values) > threshold * scale]
    return int(np.count_nonzero(np.diff(np.sign(significant)) != 0))


class ShootingSolver:
    def __init__(
        self,
        system,
        grid,
        scan_points=400,
        tolerance=1e-10,
        match_fraction=0.25,
        rtol=1e-11,
        atol=1e-30,
        method="DOP853",
    ):
        self.system = system
        self.grid = grid
        self.scan_points = scan_points
        self.tolerance = tolerance
        self.rtol = rtol
        self.atol = atol
        self.method = method
        self.match_index = grid.index_of(match_fraction * grid.r_max)
        if not 2 <= self.match_index <= grid.points - 3:
            raise InvalidScenario("The matching radius must lie inside the grid")

    @property
    def match_radius(self):
        return self.grid.r[self.match_index]

    # Integration

    def _integrate(self, energies, r_start, r_end, G, F, t_eval=None):
        """Integrate every energy from ``r_start`` to ``r_end`` in one solve.

        Integration restarts at potential breakpoints. Returns the final
        ``(G, F)`` and, when ``t_eval`` is given, the values there.

        """
        energies = np.asarray(energies, dtype=float)
        n = energies.size
        system = self.system

        def fun(r, y):
            dG, dF = system.derivatives(r, energies, y[:n], y[n:])
            return np.concatenate((dG, dF))

        lo, hi = sorted((r_start, r_end))
        cuts = [b for b in system.breakpoints if lo < b < hi]
        edges = [r_start] + (cuts if r_start < r_end else cuts[::-1]) + [r_end]

        y = np.concatenate((np.broadcast_to(G, n), np.broadcast_to(F, n))).astype(float)
        samples = []
        for i, (a, b) in enumerate(zip(edges, edges[1:])):
            last = i == len(edges) - 2
            seg_eval = None
            if t_eval is not None:
                if a < b:
                    keep = (t_eval >= a) & ((t_eval < b) | last)
                else:
                    keep = (t_eval <= a) & ((t_eval > b) | last)
                seg_eval = t_eval[keep]
                # The segment end is always sampled so the next one can start there.
                with_end = seg_eval.size == 0 or seg_eval[-1] != b
                if with_end:
                    seg_eval = np.append(seg_eval, b)
            result = solve_ivp(
                fun,
                (a, b),
                y,
                method=self.method,
                rtol=self.rtol,
                atol=self.atol,
                t_eval=seg_eval,
            )
            if not result.success:
                raise SolverError(f"ODE integration failed on [{a}, {b}]: {result.message}")
            y = result.y[:, -1]
            if t_eval is not None:
                samples.append(result.y[:, :-1] if with_end else result.y)
        G, F = y[:n], y[n:]
        if t_eval is None:
            return G, F
        values = np.concatenate(samples, axis=1)
        return G, F, values[:n], values[n:]

    def matching_function(self, energies):
        """Normalized Wronskian of the outward and inward solutions."""
        energies = np.atleast_1d(np.asarray(energies, dtype=float))
        grid = self.grid
        r_m = self.match_radius
        G_o, F_o = self._integrate(
            energies, grid.r_min, r_m, *self.system.outward_start(energies, grid.r_min)
        )
        G_i, F_i = self._integrate(
            energies, grid.r_max, r_m, *self.system.inward_start(energies, grid.r_max)
        )
        norm = np.sqrt((G_o**2 + F_o**2) * (G_i**2 + F_i**2))
        return (G_o * F_i - F_o * G_i) / norm

    # Eigenvalues

    def _bound_scan_energies(self, window):
        lo, hi = window
        if not lo < hi:
            raise InvalidScenario(f"Empty energy window {window}")
        energies = np.linspace(lo, hi, self.scan_points)
        bound = self.system.q_asymptotic(energies) < 0
        if not bound.any():
            raise NoStateFound(f"No energy in {window} is bound asymptotically (continuum)")
        q_edge = self.system.q(energies, self.grid.r_max)
        outside = bound & (q_edge >= 0)
        if outside.any():
            raise TurningPointOutsideGrid(
                f"E = {energies[outside][0]:.6g} is classically allowed at "
                f"r_max = {self.grid.r_max}; increase r_max"
            )
        return energies, bound

    def bound_energies(self, window):
        """Locate every bound-state energy in ``window``."""
        energies, bound = self._bound_scan_energies(window)
        w = np.full(energies.shape, np.nan)
        w[bound] = self.matching_function(energies[bound])

        roots = []
        brackets = []
        for i in range(len(energies) - 1):
            if not (bound[i] and bound[i + 1]):
                continue
            if w[i] == 0:
                roots.append(energies[i])
            elif w[i] * w[i + 1] < 0:
                brackets.append((energies[i], energies[i + 1], w[i]))
        log.debug(
            "Scanned %d energies in %s: %d brackets", bound.sum(), tuple(window), len(brackets)
        )
        if brackets:
            roots.extend(self._bisect(*map(np.array, zip(*brackets))))
        return np.sort(np.array(roots, dtype=float))

    def _bisect(self, lo, hi, w_lo):
        while np.max(hi - lo) > self.tolerance:
            mid = (lo + hi) / 2
            w_mid = self.matching_function(mid)
            same = np.sign(w_mid) == np.sign(w_lo)
            lo = np.where(same, mid, lo)
            w_lo = np.where(same, w_mid, w_lo)
            hi = np.where(same, hi, mid)
        return list((lo + hi) / 2)

    # States

    def state(self, energy):
        """Return normalized ``(G, F)`` on the grid for ``energy``."""
        grid = self.grid
        m = self.match_index
        energy = np.array([energy], dtype=float)
        *_, G_o, F_o = self._integrate(
            energy,
            grid.r_min,
            grid.r[m],
            *self.system.outward_start(energy, grid.r_min),
            t_eval=grid.r[: m + 1],
        )
        *_, G_i, F_i = self._integrate(
            energy,
            grid.r_max,
            grid.r[m],
            *self.system.inward_start(energy, grid.r_max),
            t_eval=grid.r[m:][::-1],
        )
        G_o, F_o = G_o[0], F_o[0]
        G_i, F_i = G_i[0][::-1], F_i[0][::-1]
        if abs(G_o[-1]) >= abs(F_o[-1]):
            scale = G_o[-1] / G_i[0]
        else:
            scale = F_o[-1] / F_i[0]
        G = np.concatenate((G_o[:-1], scale * G_i))
        F = np.concatenate((F_o[:-1], scale * F_i))
        norm = np.sqrt(trapezoid(G**2 + F**2, grid.r))
        return G / norm, F / norm
