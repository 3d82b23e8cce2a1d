"""Exact harmonic and caloric polynomial spaces on lattice Cayley graphs,
with energy measurements for ancient heat solutions on weighted graphs."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .poly import Poly, parse_poly, format_poly  # noqa: F401
from .lattice import GeneratingSet, heat_operator, lattice_laplacian, monomial_basis, operator_matrix  # noqa: F401
from .spaces import (  # noqa: F401
    bound_check,
    caloric_basis,
    caloric_dimension_formula,
    harmonic_basis,
    poisson_solve,
    time_decompose,
    vandermonde_recover,
)
