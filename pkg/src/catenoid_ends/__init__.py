"""Balanced catenoidal-end configurations and the singly periodic minimal
surfaces they generate through the Weierstrass representation."""

from .balance import (
    BalanceReport,
    BalanceSolution,
    Configuration,
    SolverOptions,
    balance_residuals,
    legendre_config,
    solve_balance,
    sqrt13_config,
)
from .configio import read_config, write_config
from .exceptions import (
    CatenoidEndsError,
    ConfigurationError,
    DomainError,
    GeometryError,
    IterationError,
    PoleError,
    QuadratureError,
    RankError,
    SupportedRangeError,
)
from .polynomials import (
    Polynomial,
    RootSet,
    binom_sq_coeffs,
    fn_legendre_identity_defect,
    hypergeom_ode_residual,
    legendre_eval,
    poly_roots,
    root_set_distance,
)
from .surface import GridSpec, SurfaceMesh, build_mesh, export_obj, integrate_X
from .weierstrass import (
    PeriodVector,
    contour_period,
    contour_residue,
    gauss_map,
    gdh_residue,
    integrand,
    verify_conditions,
)

__version__ = "0.1.0"
