"""Abstraction-based safe control for articulated robots.

Pipeline: abstract a joint-space double integrator to the extended state
(d, ddot, M), estimate the reachable M / Mdot ranges by sampling, synthesize a
persistently feasible safety index on the abstraction, verify it on a grid,
then run minimally-invasive QP safe control on the concrete system.
"""

from ._accel import backend_name
from .errors import (
    AssumptionViolation,
    ConfigError,
    DimensionMismatch,
    InfeasiblePolytope,
    RobotFileError,
    UnboundedDirection,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation",
    "ConfigError",
    "DimensionMismatch",
    "InfeasiblePolytope",
    "RobotFileError",
    "UnboundedDirection",
    "backend_name",
    "__version__",
]
