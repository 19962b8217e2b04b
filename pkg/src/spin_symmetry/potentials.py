"""Potential profiles of one coordinate (a radius or the axial ``z``).

Profiles are callables accepting scalars or numpy arrays. Radial shapes
are evaluated at ``|x|`` so the same profile serves the radial solvers
and the symmetric 1D problem.

Profiles round-trip through plain dicts (the form they take in config
files)::

    >>> well = WoodsSaxon(depth=-60, radius=4, diffuseness=0.6)
    >>> well.to_dict()
    {'kind': 'woods_saxon', 'depth': -60.0, 'radius': 4.0, 'diffuseness': 0.6}
    >>> PotentialProfile.from_dict(well.to_dict()) == well
    True

and compose with ``+`` and ``*``::

    >>> broken = Constant(-2) + 0.1 * well
    >>> broken.kind
    'sum'
    >>> float(broken(100.0))
    -2.0

"""
import math
from abc import ABCMeta, abstractmethod

import numpy as np
from scipy.special import expit


__all__ = [
    "Constant",
    "Harmonic",
    "PotentialProfile",
    "Product",
    "Scaled",
    "SquareWell",
    "Sum",
    "Tanh",
    "WoodsSaxon",
    "make_profile",
]


class PotentialProfile(metaclass=ABCMeta):

    #: Name used in config files; subclasses with a kind are registered.
    kind = None

    registry = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.kind:
            PotentialProfile.registry[cls.kind] = cls

    @abstractmethod
    def __call__(self, x):
        """Evaluate at ``x``."""

    @abstractmethod
    def derivative(self, x):
        """Evaluate the first derivative at ``x``."""

    @property
    @abstractmethod
    def asymptote(self):
        """Limit as ``x -> +inf`` (may be infinite)."""

    @property
    def breakpoints(self):
        """Positive ``x`` where the profile is discontinuous."""
        return ()

    @abstractmethod
    def parameters(self):
        """Parameters as a dict of plain values."""

    def to_dict(self):
        return {"kind": self.kind, **self.parameters()}

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        kind = data.pop("kind", None)
        if kind not in cls.registry:
            known = ", ".join(sorted(cls.registry))
            raise ValueError(f"Unknown potential kind `{kind}` (known kinds: {known})")
        try:
            return cls.registry[kind].from_parameters(**data)
        except TypeError as exc:
            raise ValueError(f"Bad parameters for potential `{kind}`: {exc}") from None

    @classmethod
    def from_parameters(cls, **parameters):
        return cls(**parameters)

    def is_constant(self):
        return False

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Constant(other)
        if not isinstance(other, PotentialProfile):
            return NotImplemented
        return Sum(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Scaled(other, self)
        if isinstance(other, PotentialProfile):
            return Product(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Scaled(-1.0, self)

    def __eq__(self, other):
        if not isinstance(other, PotentialProfile):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self))

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.parameters().items())
        return f"{self.__class__.__name__}({params})"


class Constant(PotentialProfile):

    kind = "constant"

    def __init__(self, value):
        self.value = float(value)

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)[()]

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))[()]

    @property
    def asymptote(self):
        return self.value

    def parameters(self):
        return {"value": self.value}

    def is_constant(self):
        return True


class WoodsSaxon(PotentialProfile):

    """``depth / (1 + exp((|x| - radius) / diffuseness))``"""

    kind = "woods_saxon"

    def __init__(self, depth, radius, diffuseness):
        if radius <= 0 or diffuseness <= 0:
            raise ValueError("Woods-Saxon radius and diffuseness must be positive")
        self.depth = float(depth)
        self.radius = float(radius)
        self.diffuseness = float(diffuseness)

    def _fermi(self, x):
        return expit((self.radius - np.abs(np.asarray(x, dtype=float))) / self.diffuseness)

    def __call__(self, x):
        return (self.depth * self._fermi(x))[()]

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        f = self._fermi(x)
        return (-self.depth * f * (1 - f) / self.diffuseness * np.sign(x))[()]

    @property
    def asymptote(self):
        return 0.0

    def parameters(self):
        return {"depth": self.depth, "radius": self.radius, "diffuseness": self.diffuseness}


class SquareWell(PotentialProfile):

    """``depth`` for ``|x| < radius``, zero outside."""

    kind = "square_well"

    def __init__(self, depth, radius):
        if radius <= 0:
            raise ValueError("Square well radius must be positive")
        self.depth = float(depth)
        self.radius = float(radius)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < self.radius, self.depth, 0.0)[()]

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))[()]

    @property
    def asymptote(self):
        return 0.0

    @property
    def breakpoints(self):
        return (self.radius,)

    def parameters(self):
        return {"depth": self.depth, "radius": self.radius}


class Harmonic(PotentialProfile):

    """``k x^2 / 2``"""

    kind = "harmonic"

    def __init__(self, k):
        self.k = float(k)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return (0.5 * self.k * x**2)[()]

    def derivative(self, x):
        return (self.k * np.asarray(x, dtype=float))[()]

    @property
    def asymptote(self):
        return math.copysign(math.inf, self.k) if self.k else 0.0

    def parameters(self):
        return {"k": self.k}


class Tanh(PotentialProfile):

    """``amplitude * tanh(x / width)``; odd in ``x``."""

    kind = "tanh"

    def __init__(self, amplitude=1.0, width=1.0):
        if width <= 0:
            raise ValueError("tanh width must be positive")
        self.amplitude = float(amplitude)
        self.width = float(width)

    def __call__(self, x):
        return (self.amplitude * np.tanh(np.asarray(x, dtype=float) / self.width))[()]

    def derivative(self, x):
        t = np.tanh(np.asarray(x, dtype=float) / self.width)
        return (self.amplitude * (1 - t**2) / self.width)[()]

    @property
    def asymptote(self):
        return self.amplitude

    def parameters(self):
        return {"amplitude": self.amplitude, "width": self.width}


# Composites


class Sum(PotentialProfile):

    kind = "sum"

    def __init__(self, *terms):
        self.terms = tuple(make_profile(t) for t in terms)

    @classmethod
    def from_parameters(cls, terms):
        return cls(*terms)

    def __call__(self, x):
        return sum(t(x) for t in self.terms)

    def derivative(self, x):
        return sum(t.derivative(x) for t in self.terms)

    @property
    def asymptote(self):
        return sum(t.asymptote for t in self.terms)

    @property
    def breakpoints(self):
        return tuple(sorted(set(b for t in self.terms for b in t.breakpoints)))

    def parameters(self):
        return {"terms": [t.to_dict() for t in self.terms]}

    def is_constant(self):
        return all(t.is_constant() for t in self.terms)


class Scaled(PotentialProfile):

    kind = "scaled"

    def __init__(self, factor, profile):
        self.factor = float(factor)
        self.profile = make_profile(profile)

    def __call__(self, x):
        return self.factor * self.profile(x)

    def derivative(self, x):
        return self.factor * self.profile.derivative(x)

    @property
    def asymptote(self):
        if self.factor == 0:
            return 0.0
        return self.factor * self.profile.asymptote

    @property
    def breakpoints(self):
        return self.profile.breakpoints

    def parameters(self):
        return {"factor": self.factor, "profile": self.profile.to_dict()}

    def is_constant(self):
        return self.factor == 0 or self.profile.is_constant()


class Product(PotentialProfile):

    kind = "product"

    def __init__(self, first, second):
        self.first = make_profile(first)
        self.second = make_profile(second)

    def __call__(self, x):
        return self.first(x) * self.second(x)

    def derivative(self, x):
        return self.first.derivative(x) * self.second(x) + self.first(x) * self.second.derivative(
            x
        )

    @property
    def asymptote(self):
        return self.first.asymptote * self.second.asymptote

    @property
    def breakpoints(self):
        return tuple(sorted(set(self.first.breakpoints + self.second.breakpoints)))

    def parameters(self):
        return {"first": self.first.to_dict(), "second": self.second.to_dict()}

    def is_constant(self):
        return self.first.is_constant() and self.second.is_constant()


def make_profile(spec):
    """Accept a profile, a ``{"kind": ...}`` mapping or a number."""
    if isinstance(spec, PotentialProfile):
        return spec
    if isinstance(spec, (int, float)):
        return Constant(spec)
    return PotentialProfile.from_dict(spec)


def validate_profile(spec):
    """Config validator: return an error message or ``None``."""
    try:
        make_profile(spec)
    except (ValueError, TypeError, AttributeError) as exc:
        return str(exc)
    return None
