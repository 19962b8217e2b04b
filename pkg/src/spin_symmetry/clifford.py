"""Gamma matrices in the Dirac representation and coupling-matrix checks.

All matrices here are 4x4 complex numpy arrays. The basic matrices have
entries in {0, +-1, +-i}, so their products are exact in floating point
and the structural checks below give exact zeros rather than small
residuals::

    >>> gram = basis_gram_matrix(build_gamma_basis())
    >>> bool(np.array_equal(gram, np.eye(16)))
    True

"""
import itertools
import logging

import numpy as np

from .exc import InvalidCoupling, InvalidLambda, NonHermitianInput


__all__ = [
    "ALPHA",
    "BETA",
    "GAMMA",
    "GAMMA5",
    "IDENTITY",
    "SIGMA",
    "BasisElement",
    "ConditionReport",
    "GammaBasis",
    "alpha_identity_residual",
    "anticommutator",
    "build_gamma_basis",
    "check_O_conditions",
    "check_weak_conditions",
    "commutator",
    "enumerate_strict_candidates",
    "expand_in_basis",
    "implication_scan",
]


log = logging.getLogger(__name__)

TOLERANCE = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

IDENTITY = np.eye(4, dtype=complex)

GAMMA = (
    np.diag([1, 1, -1, -1]).astype(complex),
    *(np.block([[np.zeros((2, 2)), s], [-s, np.zeros((2, 2))]]) for s in PAULI),
)

GAMMA5 = 1j * GAMMA[0] @ GAMMA[1] @ GAMMA[2] @ GAMMA[3]
BETA = GAMMA[0]
ALPHA = tuple(BETA @ g for g in GAMMA[1:])
SIGMA = tuple(np.kron(np.eye(2), s) for s in PAULI)

METRIC = np.diag([1, -1, -1, -1])

# Levi-Civita symbol as (i, j, k) triples with their signs
EPSILON = tuple(
    (i, j, k, 1 if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1)
    for i, j, k in itertools.permutations(range(3))
)


def anticommutator(a, b):
    return a @ b + b @ a


def commutator(a, b):
    return a @ b - b @ a


def max_abs(matrix):
    """Chebyshev norm (largest entry magnitude)."""
    matrix = np.asarray(matrix)
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def is_hermitian(matrix, tolerance=TOLERANCE):
    return max_abs(matrix - matrix.conj().T) <= tolerance


def dot_alpha(vector):
    """``alpha . vector`` for a real 3-vector."""
    return sum(c * a for c, a in zip(vector, ALPHA))


def dot_sigma(vector):
    return sum(c * s for c, s in zip(vector, SIGMA))


def sigma_from_alpha():
    """Spin matrices computed as ``alpha x alpha / 2i``.

    These equal ``gamma5 alpha_i`` (and the block-diagonal ``SIGMA``).

    """
    sigma = [np.zeros((4, 4), dtype=complex) for _ in range(3)]
    for i, j, k, sign in EPSILON:
        sigma[k] += sign * ALPHA[i] @ ALPHA[j] / 2j
    return tuple(sigma)


def alpha_identity_residual(a, b):
    """Residual of ``(alpha.A)(alpha.B) = A.B + i (A x B).Sigma``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lhs = dot_alpha(a) @ dot_alpha(b)
    rhs = np.dot(a, b) * IDENTITY + 1j * dot_sigma(np.cross(a, b))
    return max_abs(lhs - rhs)


def alpha_identity_sweep(seed, samples=100, span=1.0):
    """Largest identity residual over random vector pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a, b = rng.uniform(-span, span, size=(2, 3))
        worst = max(worst, alpha_identity_residual(a, b))
    return worst


class BasisElement:

    """A named product of gamma matrices.

    ``mask`` has bit ``mu`` set when ``gamma^mu`` is a factor, so the
    number of distinct gamma factors is its popcount.

    """

    def __init__(self, name, matrix, mask):
        self.name = name
        self.matrix = matrix
        self.mask = mask

    @property
    def gamma_count(self):
        return bin(self.mask).count("1")

    @property
    def odd(self):
        return self.gamma_count % 2 == 1

    def hermitized(self):
        """Return the element, multiplied by ``i`` if anti-Hermitian."""
        if is_hermitian(self.matrix):
            return self
        if max_abs(self.matrix + self.matrix.conj().T) > TOLERANCE:
            raise NonHermitianInput(f"{self.name} is neither Hermitian nor anti-Hermitian")
        return BasisElement(f"i*{self.name}", 1j * self.matrix, self.mask)

    def __repr__(self):
        return f"<BasisElement {self.name} ({self.gamma_count} gamma)>"


class GammaBasis:

    """The 16 linearly independent gamma-matrix products."""

    def __init__(self, elements):
        self.elements = tuple(elements)
        self._by_name = {e.name: e for e in self.elements}

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, name):
        if isinstance(name, int):
            return self.elements[name]
        return self._by_name[name]

    def names(self):
        return [e.name for e in self.elements]


def build_gamma_basis():
    """Build ``{I, gamma^mu, sigma^{mu nu}, gamma^mu gamma5, gamma5}``."""
    elements = [BasisElement("I", IDENTITY, 0)]
    for mu in range(4):
        elements.append(BasisElement(f"gamma{mu}", GAMMA[mu], 1 << mu))
    for mu, nu in itertools.combinations(range(4), 2):
        matrix = 1j * GAMMA[mu] @ GAMMA[nu]
        elements.append(BasisElement(f"sigma{mu}{nu}", matrix, (1 << mu) | (1 << nu)))
    for mu in range(4):
        matrix = GAMMA[mu] @ GAMMA5
        elements.append(BasisElement(f"gamma{mu}*gamma5", matrix, (1 << mu) ^ 0b1111))
    elements.append(BasisElement("gamma5", GAMMA5, 0b1111))
    return GammaBasis(elements)


def basis_gram_matrix(basis):
    """``Tr(B_a B_b^dagger) / 4`` for all pairs."""
    matrices = [e.matrix for e in basis]
    return np.array([[np.trace(a @ b.conj().T) / 4 for b in matrices] for a in matrices])


def expand_in_basis(matrix, basis=None):
    """Coefficients of ``matrix`` in the (unitary) basis, keyed by name."""
    basis = build_gamma_basis() if basis is None else basis
    return {e.name: np.trace(e.matrix.conj().T @ matrix) / 4 for e in basis}


class ConditionReport:

    """Outcome of checking a coupling matrix ``O``.

    For the weak conditions, ``form`` names the structure of ``O``
    (``lambda.alpha`` or ``i beta lambda.alpha``) and ``residuals``
    holds the individual weak-condition residuals.

    """

    def __init__(
        self,
        involutory,
        anticommutes_with_alpha,
        commutes_with_sigma,
        odd_gamma_count,
        max_residual,
        residuals=None,
        form=None,
        tolerance=TOLERANCE,
    ):
        self.involutory = involutory
        self.anticommutes_with_alpha = anticommutes_with_alpha
        self.commutes_with_sigma = commutes_with_sigma
        self.odd_gamma_count = odd_gamma_count
        self.max_residual = max_residual
        self.residuals = dict(residuals or {})
        self.form = form
        self.tolerance = tolerance

    @property
    def consistent(self):
        """Anticommuting with alpha and odd gamma count imply commuting with Sigma."""
        if self.anticommutes_with_alpha and self.odd_gamma_count:
            return self.commutes_with_sigma
        return True

    @property
    def passed(self):
        if self.form is None:
            return all(
                (
                    self.involutory,
                    self.anticommutes_with_alpha,
                    self.commutes_with_sigma,
                    self.odd_gamma_count,
                )
            )
        checks = {k: v for k, v in self.residuals.items() if not k.endswith("identity")}
        return self.involutory and all(v <= self.tolerance for v in checks.values())

    def to_dict(self):
        return {
            "involutory": self.involutory,
            "anticommutes_with_alpha": self.anticommutes_with_alpha,
            "commutes_with_sigma": self.commutes_with_sigma,
            "odd_gamma_count": self.odd_gamma_count,
            "max_residual": self.max_residual,
            "residuals": dict(sorted(self.residuals.items())),
            "form": self.form,
            "pass": self.passed,
        }


def _check_shape(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (4, 4):
        raise InvalidCoupling(f"Expected a 4x4 spinor matrix; got shape {matrix.shape}")
    return matrix


def _strict_residuals(O):
    return {
        "involutory": max_abs(O @ O - IDENTITY),
        "anticommutes_with_alpha": max(max_abs(anticommutator(a, O)) for a in ALPHA),
        "commutes_with_sigma": max(max_abs(commutator(O, s)) for s in SIGMA),
    }


def _odd_gamma_count(O, basis, tolerance):
    coefficients = expand_in_basis(O, basis)
    present = [basis[name] for name, c in coefficients.items() if abs(c) > tolerance]
    return bool(present) and all(e.odd for e in present)


def check_O_conditions(O, basis=None, tolerance=TOLERANCE):
    """Check ``O^2 = I``, ``{alpha_i, O} = 0``, ``[O, Sigma_i] = 0`` and odd gamma count.

    ``max_residual`` is the largest entry over the violated relations.

    """
    O = _check_shape(O)
    basis = build_gamma_basis() if basis is None else basis
    hermiticity = max_abs(O - O.conj().T)
    if hermiticity > tolerance:
        raise NonHermitianInput(f"O is not Hermitian (max |O - O^dagger| = {hermiticity:.3g})")
    residuals = _strict_residuals(O)
    flags = {name: value <= tolerance for name, value in residuals.items()}
    violated = [residuals[name] for name, ok in flags.items() if not ok]
    return ConditionReport(
        involutory=flags["involutory"],
        anticommutes_with_alpha=flags["anticommutes_with_alpha"],
        commutes_with_sigma=flags["commutes_with_sigma"],
        odd_gamma_count=_odd_gamma_count(O, basis, tolerance),
        max_residual=max(violated, default=0.0),
        residuals=residuals,
        tolerance=tolerance,
    )


def enumerate_strict_candidates(basis=None, tolerance=TOLERANCE):
    """Return the hermitized basis elements passing every strict condition."""
    basis = build_gamma_basis() if basis is None else basis
    candidates = []
    for element in basis:
        element = element.hermitized()
        report = check_O_conditions(element.matrix, basis, tolerance)
        log.debug("%s: %s", element.name, "pass" if report.passed else "fail")
        if report.passed:
            candidates.append(element)
    return candidates


def implication_scan(basis=None, tolerance=TOLERANCE):
    """Return names of hermitized elements contradicting the Sigma implication.

    The list is expected to be empty.

    """
    basis = build_gamma_basis() if basis is None else basis
    counterexamples = []
    for element in basis:
        element = element.hermitized()
        if not check_O_conditions(element.matrix, basis, tolerance).consistent:
            counterexamples.append(element.name)
    return counterexamples


def check_weak_conditions(O, lam, epsilon, p, basis=None, tolerance=TOLERANCE):
    """Check the relaxed conditions for ``O = lambda.alpha`` or ``O = i beta lambda.alpha``.

    Residuals:

    - ``epsilon``: ``max |[O, epsilon.Sigma]|``; zero iff lambda is
      parallel to epsilon
    - ``epsilon_identity``: deviation of that commutator from its
      closed form in terms of ``lambda x epsilon``
    - ``momentum``: ``|lambda.p|`` for ``lambda.alpha``; ``max
      |{beta lambda.alpha, alpha.p}|`` for ``i beta lambda.alpha``
    - ``momentum_identity`` (``i beta lambda.alpha`` only): deviation
      of that anticommutator from ``2i beta (lambda x p).Sigma``

    """
    O = _check_shape(O)
    lam = np.asarray(lam, dtype=float)
    epsilon = np.asarray(epsilon, dtype=float)
    p = np.asarray(p, dtype=float)
    basis = build_gamma_basis() if basis is None else basis

    norm = float(np.linalg.norm(lam))
    if abs(norm - 1) > tolerance:
        raise InvalidLambda(f"lambda must be a unit vector; |lambda| = {norm:.12g}")

    lam_alpha = dot_alpha(lam)
    eps_sigma = dot_sigma(epsilon)
    closed_form = 2j * dot_alpha(np.cross(lam, epsilon))

    if max_abs(O - lam_alpha) <= tolerance:
        form = "lambda.alpha"
        eps_commutator = commutator(lam_alpha, eps_sigma)
        residuals = {
            "epsilon": max_abs(eps_commutator),
            "epsilon_identity": max_abs(eps_commutator - closed_form),
            "momentum": abs(float(np.dot(lam, p))),
        }
    elif max_abs(O - 1j * BETA @ lam_alpha) <= tolerance:
        form = "i beta lambda.alpha"
        eps_commutator = commutator(O, eps_sigma)
        p_anticommutator = anticommutator(BETA @ lam_alpha, dot_alpha(p))
        residuals = {
            "epsilon": max_abs(eps_commutator),
            "epsilon_identity": max_abs(eps_commutator - 1j * BETA @ closed_form),
            "momentum": max_abs(p_anticommutator),
            "momentum_identity": max_abs(
                p_anticommutator - 2j * BETA @ dot_sigma(np.cross(lam, p))
            ),
        }
    else:
        raise InvalidCoupling("O is neither lambda.alpha nor i beta lambda.alpha for this lambda")

    strict = _strict_residuals(O)
    violated = [v for k, v in residuals.items() if v > tolerance]
    return ConditionReport(
        involutory=strict["involutory"] <= tolerance,
        anticommutes_with_alpha=strict["anticommutes_with_alpha"] <= tolerance,
        commutes_with_sigma=strict["commutes_with_sigma"] <= tolerance,
        odd_gamma_count=_odd_gamma_count(O, basis, tolerance),
        max_residual=max(violated, default=0.0),
        residuals=residuals,
        form=form,
        tolerance=tolerance,
    )
