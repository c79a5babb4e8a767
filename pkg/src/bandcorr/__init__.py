"""Second correlation function of characteristic polynomials for real symmetric block band matrices."""

__version__ = "0.1.0"

from .harmonics import (
    build_basis,
    ds_function,
    iz_integral,
    laplace_spectrum,
    nu_matrix,
    quadrature_rule,
    transfer_eigenvalue,
)
from .limits import (
    critical_limit,
    delocalized_limit,
    finite_n_propagator,
    localized_limit,
    matrix_exponential,
    regime_curve,
)
from .mc_oracle import EnsembleParams, estimate_ratio, variance_profile
from .scaling import saddle_points, scaled_pair, semicircle_density, t_star
