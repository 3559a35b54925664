"""Wright functions, fractional calculus on grids and closed-form solutions of
multi-time fractional systems with commuting coefficient matrices."""

from fracwright.errors import (
    BadExponents,
    DomainExceeded,
    FracWrightError,
    NoDecay,
    NonConvergent,
    NonPositiveSpectrum,
    NumericalError,
    ParseError,
    SpecViolation,
)
from fracwright.fundsol import ProblemSpec, QuadratureConfig, fundamental_G, phi_alpha_delta
from fracwright.matfun import matrix_exp, matrix_wright
from fracwright.solver import BoundaryData, SourceTerm, solve_at_point, solve_on_grid
from fracwright.wright import SeriesConfig, WrightParams, mittag_leffler, wright_phi, wright_type_e

__version__ = "0.1.0"

__all__ = [
    "BadExponents",
    "BoundaryData",
    "DomainExceeded",
    "FracWrightError",
    "NoDecay",
    "NonConvergent",
    "NonPositiveSpectrum",
    "NumericalError",
    "ParseError",
    "ProblemSpec",
    "QuadratureConfig",
    "SeriesConfig",
    "SourceTerm",
    "SpecViolation",
    "WrightParams",
    "fundamental_G",
    "matrix_exp",
    "matrix_wright",
    "mittag_leffler",
    "phi_alpha_delta",
    "solve_at_point",
    "solve_on_grid",
    "wright_phi",
    "wright_type_e",
]
