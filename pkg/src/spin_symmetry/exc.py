class SpinSymmetryError(Exception):

    pass


# Configuration


class ConfigError(SpinSymmetryError):

    """Raised when a run configuration doesn't validate.

    ``fields`` holds the dotted paths of the offending settings so the
    CLI can point at them.

    """

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = tuple(fields)


class StrategyError(ConfigError):

    pass


class ConfigFileNotFoundError(ConfigError):

    pass


class ConfigSectionNotFoundError(ConfigError, LookupError):

    pass


class NoDefaultError(ConfigError):

    pass


class NoValueError(ConfigError):

    pass


# Spinor algebra


class AlgebraError(SpinSymmetryError, ValueError):

    pass


class NonHermitianInput(AlgebraError):

    pass


class InvalidLambda(AlgebraError):

    pass


class InvalidCoupling(AlgebraError):

    pass


class ZeroMomentum(AlgebraError):

    pass


# Solvers


class SolverError(SpinSymmetryError):

    pass


class InvalidScenario(SolverError, ValueError):

    pass


class NoStateFound(SolverError):

    pass


class TurningPointOutsideGrid(SolverError):

    pass


class IterationDiverged(SolverError):

    pass


class DoublingDetected(SolverError):

    pass


class SingularDenominator(SolverError):

    """Raised when E - V vanishes on the grid.

    ``radii`` holds the radii where the denominator vanishes or changes
    sign.

    """

    def __init__(self, message, radii=()):
        super().__init__(message)
        self.radii = tuple(radii)
