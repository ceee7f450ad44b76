"""Pseudospectral simulator and verification lab for the EP_alpha system.

A periodic-torus laboratory for the dispersive Euler-Poincare equations
with parameter alpha in [0, 1]: spectral operators, Littlewood-Paley
analysis, the bilinear EP forms, RK4 integration, and four experiments
probing alpha-uniform existence, the zero-dispersion limit, Bona-Smith
splitting bounds, and the supporting inequality estimates.
"""

from .grid import SpectralField, TorusGrid, VelocityField
from .dynamics import (
    EPState,
    MatrixField,
    bilinear_M,
    bilinear_N,
    camassa_holm_rhs,
    commutator_pairing,
    convexity_pairing,
    energy_kinetic,
    energy_l2,
    momentum,
    rhs_ep0,
    rhs_ep_alpha,
)
from .integrate import (
    BlowUpError,
    DiagnosticsRow,
    IntegrationResult,
    SimParams,
    doubling_time,
    integrate,
    step_rk4,
)
from .lp import LPFamily, besov_norm, build_lp_family, dyadic_block, low_cutoff
from .spectral import (
    apply_multiplier,
    dealias,
    dealias_field,
    divergence,
    gradient,
    helmholtz_inverse,
    jacobian,
    lambda_s,
    lambda_s_alpha,
    linf_norm,
    sobolev_norm,
    transform_forward,
    transform_inverse,
)

__version__ = "0.1.0"
