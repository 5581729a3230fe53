"""High-precision laboratory for monic orthogonal polynomials with weight
x^lambda exp(-x^2 + t x) on (0, inf)."""

__version__ = "0.1.0"

from .exceptions import ConvergenceError, CrossCheckError, DomainError, PrecisionExhaustedError, SCLaguerreError
from .numerics import PrecisionContext, RealSeries, fd_derivative
from .moments import MomentTable, WeightParams, moment, moment_table
from .opcore import RecurrenceTable, recurrence_table
from .identities import IDENTITIES, IdentityReport, identity_reports
from .fluid import FluidSolution, density, solve_endpoints
from .asymptotics import compare_to_exact, expansion, extract_constants

__all__ = [
    "__version__",
    "SCLaguerreError", "DomainError", "PrecisionExhaustedError", "CrossCheckError", "ConvergenceError",
    "PrecisionContext", "RealSeries", "fd_derivative",
    "WeightParams", "MomentTable", "moment", "moment_table",
    "RecurrenceTable", "recurrence_table",
    "IDENTITIES", "IdentityReport", "identity_reports",
    "FluidSolution", "solve_endpoints", "density",
    "expansion", "compare_to_exact", "extract_constants",
]
