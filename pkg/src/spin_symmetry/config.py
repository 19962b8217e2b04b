"""Run configuration: schema, loading, validation and builders.

A run config is a section of a ``.cfg`` (INI with JSON values) or
``.json`` file holding dotted settings::

    [pseudospin]
    radial.branch = "pseudospin"
    radial.potential = {"kind": "woods_saxon", "depth": 60, "radius": 4, "diffuseness": 0.6}
    radial.constant = 2
    radial.window = [0.001, 1.999]
    radial.kappas = [-1, 2, -2, 3]

Anything not set falls back to the defaults in :data:`SCHEMA`.

"""
import copy
import logging
import os

from jsun import loads

from .exc import ConfigError
from .loader import Loader
from .lowdim import Axial1DProblem, Planar2DProblem
from .potentials import make_profile, validate_profile
from .radial import SymmetryScenario, partner_kappa
from .settings import Settings
from .shooting import RadialGrid
from .strategy import guess_strategy_type
from .types import Option, iter_options
from .util import abs_path, get_file_name, load_dotenv


__all__ = [
    "COMMANDS",
    "RunConfig",
    "SCHEMA",
    "get_config_from_environ",
    "load_config",
    "make_schema",
]


log = logging.getLogger(__name__)

COMMANDS = ("verify-algebra", "spectrum", "doublets", "scan-breaking")
DIMENSIONS = ("3d", "2d", "1d")


# Validators return an error message or None


def one_of(*choices):
    def validator(value):
        if value not in choices:
            return f"Expected one of {', '.join(map(str, choices))}; got {value!r}"

    return validator


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def number(value):
    if not _is_number(value):
        return f"Expected a number; got {value!r}"


def positive(value):
    if not _is_number(value) or value <= 0:
        return f"Expected a positive number; got {value!r}"


def positive_int(value):
    if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
        return f"Expected a positive integer; got {value!r}"


def non_negative_int(value):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        return f"Expected a non-negative integer; got {value!r}"


def window(value):
    if not isinstance(value, list) or len(value) != 2 or not all(map(_is_number, value)):
        return f"Expected an energy window [lo, hi]; got {value!r}"
    if not value[0] < value[1]:
        return f"Energy window {value} is empty (need lo < hi)"


def vector3(value):
    if not isinstance(value, list) or len(value) != 3 or not all(map(_is_number, value)):
        return f"Expected a list of 3 numbers; got {value!r}"


def kappas(value):
    if not isinstance(value, list) or not value:
        return f"Expected a non-empty list of kappas; got {value!r}"
    for kappa in value:
        if not isinstance(kappa, int) or isinstance(kappa, bool) or kappa == 0:
            return f"kappa must be a non-zero integer; got {kappa!r}"


def m_j_values(value):
    if not isinstance(value, list) or not value:
        return f"Expected a non-empty list of m_j values; got {value!r}"
    for m_j in value:
        if not _is_number(m_j) or (m_j - 0.5) != int(m_j - 0.5):
            return f"m_j must be a half-integer; got {m_j!r}"


def amplitudes(value):
    if not isinstance(value, list) or len(value) < 2:
        return f"Expected a list of at least two amplitudes; got {value!r}"
    if not all(_is_number(a) and a > 0 for a in value):
        return f"Amplitudes must be positive numbers; got {value!r}"


def optional_profile(value):
    if value is None:
        return None
    return validate_profile(value)


def make_schema():
    """Build a fresh schema; options are stateful, so each load needs its own."""

    def grid(points):
        return {
            "r_min": Option(1e-6, "Inner radius of the shooting grid", positive),
            "r_max": Option(20.0, "Outer radius, where the decaying tail takes over", positive),
            "points": Option(points, "Number of grid points", positive_int),
            "match": Option(0.25, "Matching radius as a fraction of r_max", positive),
        }

    def breaking(potential, parent, parents):
        return {
            "shape": Option(
                potential,
                "Profile added (times amplitude) to the constant branch",
                optional_profile,
            ),
            "amplitude": Option(0.1, "Breaking amplitude of the broken branch", number),
            "amplitudes": Option(
                [0.05, 0.1, 0.2], "Amplitudes scanned by scan-breaking", amplitudes
            ),
            "parent": Option(parent, "Symmetry the breaking is applied to", one_of(*parents)),
        }

    radial_potential = Option(
        {"kind": "woods_saxon", "depth": -60.0, "radius": 4.0, "diffuseness": 0.6},
        "Active potential branch (V+ for spin, V- for pseudospin)",
        validate_profile,
    )
    # Shallow enough that the doublets followed by scan-breaking stay bound
    radial_breaking = {"kind": "woods_saxon", "depth": -5.0, "radius": 4.0, "diffuseness": 0.6}
    axial_potential = Option(
        {"kind": "square_well", "depth": -5.0, "radius": 1.0},
        "Vector potential V_1v(z)",
        validate_profile,
    )
    planar_potential = Option(
        {"kind": "square_well", "depth": -4.0, "radius": 2.0},
        "Vector potential V_2v(rho)",
        validate_profile,
    )

    return {
        "seed": Option(42, "Seed for every random sample", non_negative_int),
        "threads": Option(1, "Worker threads for independent channels", positive_int),
        "output": {
            "directory": Option("results", "Directory data files are written to"),
        },
        "spectrum": {
            "dimension": Option(
                "3d", "Problem solved by spectrum and doublets", one_of(*DIMENSIONS)
            ),
        },
        "tolerances": {
            "exact": Option(1e-12, "Commutators, SU(2) algebra, projector identities", positive),
            "identity": Option(1e-13, "alpha.A alpha.B identity", positive),
            "dispersion": Option(1e-10, "Plane-wave dispersion roots", positive),
            "rotation": Option(1e-10, "Finite rotations", positive),
            "degeneracy": Option(1e-8, "Doublet partner energies", positive),
            "oracle": Option(1e-6, "Relative agreement with the Schrödinger oracle", positive),
            "bisection": Option(1e-10, "Shooting bisection width", positive),
            "fixed_point": Option(1e-11, "Oracle fixed-point iteration", positive),
            "second_order": Option(1e-5, "Relative second-order equation residual", positive),
            "hermiticity": Option(1e-14, "Assembled matrices and channel decoupling", positive),
            "weak": Option(1e-8, "Weak-condition anticommutator on eigenstates", positive),
            "generator": Option(1e-10, "Residual U(1) generator on eigenstates", positive),
            "splitting": Option(1e-3, "Smallest splitting counted as broken", positive),
        },
        "algebra": {
            "samples": Option(100, "Random plane waves per candidate and branch", positive_int),
            "span": Option(2.0, "Momenta and potentials are drawn from [-span, span]", positive),
            "identity_span": Option(1.0, "Span of the alpha identity samples", positive),
            "epsilon": Option([0.3, -0.2, 0.5], "Finite rotation parameters", vector3),
        },
        "radial": {
            "branch": Option(
                "spin", "spin, pseudospin or broken", one_of("spin", "pseudospin", "broken")
            ),
            "potential": radial_potential,
            "constant": Option(-2.0, "Value of the constant branch", number),
            "window": Option([-1.999, -0.001], "Energy window for bound states", window),
            "kappas": Option([1, -2, 2, -3], "kappa channels", kappas),
            "grid": grid(4000),
            "scan_points": Option(400, "Energies in the bracketing scan", positive_int),
            "breaking": breaking(radial_breaking, "spin", ("spin", "pseudospin")),
        },
        "axial": {
            "relation": Option(
                "plus", "plus, minus or broken", one_of("plus", "minus", "broken")
            ),
            "potential": axial_potential,
            "constant": Option(1.0, "Constant C of the relation", number),
            "window": Option([-0.999, 0.999], "Energy window for bound states", window),
            "length": Option(20.0, "Length of the hard-walled interval", positive),
            "points": Option(2000, "Integer points of the staggered grid", positive_int),
            "stencil": Option("staggered", "staggered or central", one_of("staggered", "central")),
            "breaking": breaking(axial_potential, "plus", ("plus", "minus")),
        },
        "planar": {
            "relation": Option(
                "plus", "plus, minus or broken", one_of("plus", "minus", "broken")
            ),
            "potential": planar_potential,
            "constant": Option(1.0, "Constant C of the relation", number),
            "window": Option([-0.999, 0.999], "Energy window for bound states", window),
            "m_j": Option(
                [0.5, -0.5, 1.5, -1.5, 2.5, -2.5], "Angular momentum channels", m_j_values
            ),
            "grid": grid(4000),
            "scan_points": Option(400, "Energies in the bracketing scan", positive_int),
            "breaking": breaking(planar_potential, "plus", ("plus", "minus")),
        },
    }


SCHEMA = make_schema()

# Settings whose values are mappings but are set as a whole
WHOLE_VALUES = {
    "radial.potential",
    "radial.breaking.shape",
    "axial.potential",
    "axial.breaking.shape",
    "planar.potential",
    "planar.breaking.shape",
}


def describe_schema(schema=SCHEMA):
    """``(dotted.name, default, doc)`` for every option."""
    return [(name, option.default, option.doc) for name, option in iter_options(schema)]


# Cross-field checks


def _constant_branch(settings, dimension):
    """Value of the constant potential branch for the selected problem."""
    if dimension == "3d":
        return settings.radial.constant
    problem = settings.axial if dimension == "1d" else settings.planar
    relation = problem.relation
    if relation == "broken":
        relation = problem.breaking.parent
    return -problem.constant if relation == "plus" else problem.constant


def check_run(settings, command):
    """Return ``(dotted.name, message)`` errors for combinations no solver honours."""
    errors = []
    dimension = settings.spectrum.dimension
    if command == "doublets" and dimension == "1d":
        errors.append(
            (
                "spectrum.dimension",
                "doublets needs angular partners; the 1d problem has none (use 3d or 2d)",
            )
        )

    if dimension == "3d" or command == "verify-algebra":
        radial = settings.radial
        if radial.grid.r_min >= radial.grid.r_max:
            errors.append(("radial.grid.r_min", "r_min must be below r_max"))
        if radial.branch == "broken" and radial.breaking.shape is None:
            errors.append(
                ("radial.breaking.shape", "The broken branch needs a breaking profile")
            )

    if command != "verify-algebra":
        section = {"3d": "radial", "2d": "planar", "1d": "axial"}[dimension]
        lo, hi = settings[section].window
        constant = _constant_branch(settings, dimension)
        if lo <= constant <= hi:
            errors.append(
                (
                    f"{section}.window",
                    f"Energy window {[lo, hi]} contains the constant branch value "
                    f"{constant}; the Schrödinger-like reduction is singular there",
                )
            )
        if dimension != "3d":
            problem = settings[section]
            if problem.relation == "broken" and problem.breaking.shape is None:
                errors.append(
                    (
                        f"{section}.breaking.shape",
                        "The broken relation needs a breaking profile",
                    )
                )

    if command in ("doublets", "scan-breaking") and dimension == "3d":
        radial = settings.radial
        symmetry = radial.breaking.parent if radial.branch == "broken" else radial.branch
        lonely = [k for k in radial.kappas if partner_kappa(k, symmetry) is None]
        if lonely:
            needed = "kappa != -1" if symmetry == "spin" else "kappa != 1"
            errors.append(
                (
                    "radial.kappas",
                    f"kappa {lonely} has no {symmetry} partner; use {needed}",
                )
            )
    if command == "scan-breaking":
        section = {"3d": "radial", "2d": "planar", "1d": "axial"}[dimension]
        breaking = settings[section].breaking
        values = breaking.amplitudes
        if sorted(values) != values or len(set(values)) != len(values):
            errors.append((f"{section}.breaking.amplitudes", "Amplitudes must strictly increase"))
        if breaking.shape is None:
            errors.append((f"{section}.breaking.shape", "scan-breaking needs a breaking profile"))
    if dimension == "2d" and settings.planar.grid.r_min >= settings.planar.grid.r_max:
        errors.append(("planar.grid.r_min", "r_min must be below r_max"))
    return errors


class RunConfig:

    """Validated settings for one command, plus builders for the solvers."""

    def __init__(self, settings, command="spectrum", location="<defaults>"):
        self.settings = settings if isinstance(settings, Settings) else Settings(settings)
        self.command = command
        self.location = location

    def __getattr__(self, name):
        if name in ("settings", "command", "location"):
            raise AttributeError(name)
        try:
            return self.settings[name]
        except KeyError:
            raise AttributeError(name) from None

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.command == other.command and self.to_flat() == other.to_flat()

    def __repr__(self):
        return f"<RunConfig {self.command} from {self.location}>"

    @property
    def dimension(self):
        return self.settings.spectrum.dimension

    @property
    def tolerances(self):
        return self.settings.tolerances.to_plain()

    def to_flat(self):
        return self.settings.flatten(keep=WHOLE_VALUES)

    def to_dict(self):
        return {"command": self.command, **self.settings.to_plain()}

    def write(self, file_name, section="run", strategy_type=None):
        """Write every setting to ``section`` of ``file_name``."""
        file_name = abs_path(file_name)
        strategy_type = strategy_type or guess_strategy_type(file_name)
        if strategy_type is None:
            raise ConfigError(f"No strategy for writing {file_name}")
        strategy_type().write_settings(self.to_flat(), file_name, section)
        return f"{file_name}#{section}"

    # Builders

    def radial_grid(self):
        grid = self.settings.radial.grid
        return RadialGrid(grid.r_min, grid.r_max, grid.points)

    def planar_grid(self):
        grid = self.settings.planar.grid
        return RadialGrid(grid.r_min, grid.r_max, grid.points)

    def scenario(self, amplitude=None):
        """The configured radial scenario (broken at ``amplitude`` if given)."""
        radial = self.settings.radial
        branch = radial.branch
        if branch == "broken" or amplitude is not None:
            parent = radial.breaking.parent if branch == "broken" else branch
            exact = SymmetryScenario(parent, radial.potential, radial.constant)
            if amplitude is None:
                amplitude = radial.breaking.amplitude
            return SymmetryScenario.broken_from(exact, radial.breaking.shape, amplitude)
        return SymmetryScenario(branch, radial.potential, radial.constant)

    def exact_scenario(self):
        radial = self.settings.radial
        branch = radial.breaking.parent if radial.branch == "broken" else radial.branch
        return SymmetryScenario(branch, radial.potential, radial.constant)

    def _breaking(self, section, amplitude):
        breaking = section.breaking
        amplitude = breaking.amplitude if amplitude is None else amplitude
        return amplitude * make_profile(breaking.shape)

    def axial_problem(self, amplitude=None):
        axial = self.settings.axial
        relation = axial.relation
        breaking = None
        if relation == "broken" or amplitude is not None:
            breaking = self._breaking(axial, amplitude)
            parent = axial.breaking.parent if relation == "broken" else relation
            relation = "broken"
        else:
            parent = "plus"
        return Axial1DProblem.from_relation(
            relation,
            axial.potential,
            axial.constant,
            breaking,
            parent,
            length=axial.length,
            points=axial.points,
        )

    def planar_problem(self, m_j, amplitude=None):
        planar = self.settings.planar
        relation = planar.relation
        breaking = None
        if relation == "broken" or amplitude is not None:
            breaking = self._breaking(planar, amplitude)
            parent = planar.breaking.parent if relation == "broken" else relation
            relation = "broken"
        else:
            parent = "plus"
        return Planar2DProblem.from_relation(
            relation,
            planar.potential,
            planar.constant,
            breaking,
            parent,
            m_j=m_j,
            grid=self.planar_grid(),
        )


def load_config(
    file_name=None,
    section=None,
    overrides=None,
    command="spectrum",
    strategy_type=None,
    base_path=None,
):
    """Load, validate and wrap a run config.

    ``file_name`` falls back to ``$SPIN_SYMMETRY_FILE``, then to a
    ``spin-symmetry.{cfg,json}`` in the working directory, then to the
    built-in defaults. ``overrides`` are dotted settings applied last.

    Raises:
        ConfigError: With every offending dotted name in ``fields``

    """
    if command not in COMMANDS:
        raise ConfigError(f"Unknown command `{command}`", fields=["command"])
    if file_name is None:
        file_name = get_file_name()
    if file_name is not None and "#" not in file_name:
        file_name = abs_path(file_name, relative_to=base_path or os.getcwd())
    elif file_name is not None:
        path, rest = file_name.rsplit("#", 1)
        file_name = f"{abs_path(path, relative_to=base_path or os.getcwd())}#{rest}"

    loader = Loader(file_name, section, strategy_type=strategy_type)
    settings, errors = loader.load_and_check(SCHEMA, overrides)
    if not errors:
        errors = check_run(settings, command)
    if errors:
        details = "\n".join(f"  {name}: {message}" for name, message in errors)
        raise ConfigError(
            f"Run config {loader.location} is invalid:\n{details}",
            fields=[name for name, _ in errors],
        )
    log.info("Loaded %s config from %s", command, loader.location)
    return RunConfig(copy.deepcopy(settings), command, loader.location)


def get_config_from_environ(dotenv_file=None, base_path=None, file_name=".env"):
    """Read ``SPIN_SYMMETRY_CONFIG_*`` flags (JSON values) from the environment."""

    def get(name, default="null"):
        name = name.upper()
        name = f"SPIN_SYMMETRY_CONFIG_{name}"
        return loads(os.environ.get(name, default))

    load_dotenv(dotenv_file, base_path, file_name)
    options = (
        ("quiet", "false"),
        ("threads", "null"),
    )
    return {n: get(n, default) for (n, default) in options}
