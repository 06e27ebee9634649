"""Spectral toolkit for one-dimensional functional difference operators.

The operator family is W_V(b) = 2cosh(bP) - V with b > 0 and V >= 0
integrable.  The package evaluates its closed-form spectral functions
(core), builds finite-dimensional models and locates discrete eigenvalues
below the continuum edge by direct solves and by the Birman-Schwinger
principle (discretize), and runs the theorem-shaped checks: the sharp
spectral-sum inequality and its delta-potential equality case, Ky Fan
majorisation and the convolution semigroup behind it, weak-coupling bounds,
the failure of sub-1/2 Riesz exponents, and the small-b Schrodinger limit
(analysis).  A small CLI (fdo-spectra) drives reproducible experiment runs.
"""

from .core import (
    IMAG_BRANCH,
    PI_SQ,
    REAL_BRANCH,
    DeltaSolution,
    Scale,
    SpectralPoint,
    cos_sqrt,
    delta_eigenfunction,
    delta_solve,
    free_symbol,
    g_fn,
    g_hat,
    g_hat_box,
    lambda_from_theta,
    resolvent_diagonal,
    resolvent_kernel,
    shift_symbol,
    sin_ratio,
    spectral_point_from_lambda,
    spectral_point_from_theta,
)
from .errors import (
    ConfigError,
    EdgeError,
    FdoError,
    GridResolutionError,
    NumericError,
    ParameterError,
    SymbolOverflowError,
    TailError,
)

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    GroundStateReport,
    KyFanProfile,
    LTReport,
    RieszReport,
    draw_standard_ensemble,
    ensemble_grid,
    gamma_necessity_sweep,
    ground_state_explorer,
    ky_fan_profile,
    l_theta_matrix,
    lt_sum,
    majorisation_check,
    make_k_grid,
    quadratic_form_identity,
    riesz_means,
    schrodinger_limit_check,
    semigroup_check,
    strict_comparison_check,
    verify_lt,
    weak_coupling_form,
    weak_coupling_potential_term,
)
from .discretize import (  # noqa: E402
    BSMatrix,
    EigenReport,
    Grid,
    OperatorMatrix,
    Potential,
    assemble_operator,
    bs_eigenvalues,
    bs_locate,
    bs_matrix,
    eigens_below,
    load_sampled_potential,
    make_grid,
    potential_values,
    wv_lower_bound_certificate,
)
