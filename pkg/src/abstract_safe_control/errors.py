"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Vector/matrix dimensions do not agree with the declared sizes."""


class InfeasiblePolytope(ValueError):
    """An H-polytope turned out to be empty (or an LP over it infeasible)."""


class UnboundedDirection(RuntimeError):
    """A linear program is unbounded in the requested direction."""


class AssumptionViolation(RuntimeError):
    """The zero-in-interior assumption on the abstract control set failed.

    Raised when 0 is not strictly inside the implementable abstract control
    set at a state, which makes the control-radius M undefined there.
    """


class RobotFileError(ValueError):
    """A robot description file failed to parse or validate.

    The message always cites the offending line or field path.
    """


class ConfigError(ValueError):
    """A run configuration is malformed or references missing files."""
