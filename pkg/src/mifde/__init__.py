"""Linear Caputo fractional systems with mixed orders per block.

Three solution routes (power/Gamma series, L1 stepping, rational-order
spectral form), stability tests and stability-boundary curves.
"""

from mifde.errors import DomainError, MifdeError, NumericalError
from mifde.l1 import caputo_apply, step_solve
from mifde.polynomials import ComplexPolynomial, characteristic_polynomial, find_roots, partial_fractions
from mifde.series import CoefficientPyramid, build_pyramid, eval_P, solve_series, solve_series_forced
from mifde.special_functions import EvalReport, MLParams, ml, ml_matrix, ml_value
from mifde.spectral import SpectralForm, decompose, decompose_commensurate, eval_spectral
from mifde.stability import (
    BoundarySample,
    StabilityVerdict,
    boundary_closed_form,
    boundary_curve,
    matignon_stable,
    rational_index_stable,
    theorem13_bound,
    two_term_stable,
)
from mifde.systems import MixedSystem, MultiIndexSystem, Trajectory, parse_order

__version__ = "0.1.0"
