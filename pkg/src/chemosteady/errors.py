"""Exception hierarchy shared by the solver modules and the CLI."""


class ChemosteadyError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class ConfigError(ChemosteadyError, ValueError):
    """Invalid geometry, parameters or run configuration."""

    exit_code = 2


class NonConvergenceError(ChemosteadyError, RuntimeError):
    """An iteration hit its cap without meeting its tolerance.

    ``last`` carries the final iterate (when there is one) and ``residual``
    the final residual norm, so callers can inspect or restart.
    """

    exit_code = 3

    def __init__(self, message, residual=None, last=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.last = last
        self.iterations = iterations


class StepRejected(NonConvergenceError):
    """A time step would leave the admissible set (v <= 0)."""


class MassUnreachableError(ChemosteadyError, RuntimeError):
    """Bracket expansion exceeded ``alpha_cap`` before reaching the target mass."""

    exit_code = 4

    def __init__(self, message, alpha=None, mass=None, lower_mass=None):
        super().__init__(message)
        self.alpha = alpha
        self.mass = mass
        self.lower_mass = lower_mass


class InvariantViolation(ChemosteadyError, AssertionError):
    """A property guaranteed by the discrete maximum principle failed.

    This signals a discretization or solver bug, not bad input.
    """

    exit_code = 6
