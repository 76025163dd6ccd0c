from .api import certify, solve
from .cones import NONNEG, PSD, SOC, ZERO, smat, svec, svec_dim
from .presolve import presolve
from .program import ConicProgram, ProgramError
from .solver import (INFEASIBLE, MAX_ITERATIONS, NUMERICAL_FAILURE, OPTIMAL,
                     UNBOUNDED, Solution)

__all__ = [
    "ConicProgram", "ProgramError", "Solution", "solve", "certify", "presolve",
    "svec", "smat", "svec_dim",
    "ZERO", "NONNEG", "SOC", "PSD",
    "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "MAX_ITERATIONS", "NUMERICAL_FAILURE",
]
