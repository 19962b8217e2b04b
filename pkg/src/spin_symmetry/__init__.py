from .config import RunConfig, get_config_from_environ, load_config  # noqa: exported
from .exc import ConfigError, SolverError, SpinSymmetryError  # noqa: exported
from .potentials import make_profile  # noqa: exported
from .radial import SymmetryScenario, solve_bound_states, solve_doublets  # noqa: exported
from .lowdim import Axial1DProblem, Planar2DProblem, solve_1d, solve_2d_radial  # noqa: exported
from .settings import Settings  # noqa: exported
from .util import NO_DEFAULT  # noqa: exported


__version__ = "1.0.dev0"


def run_command(command, file_name=None, section=None, overrides=None, out=None):
    """Load a config for ``command`` and run it; returns the result.

    This is what ``spin-symmetry <command>`` does, minus the exit
    status.

    """
    from .runner import run

    config = load_config(file_name, section, overrides, command)
    return run(config, out)
