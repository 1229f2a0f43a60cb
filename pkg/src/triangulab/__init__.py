"""triangulab: numerical laboratory for triangular operator spectra.

Dense desk-scale discretizations of multiplication plus Volterra operators,
fractional and log-singular convolution semigroups, and difference-kernel
integro-differential operators, together with the spectral, resolvent-growth,
and symbol-limit diagnostics that probe their structure.
"""

from .exceptions import (
    ConstructionError,
    FrequencyRangeError,
    InsufficientDataError,
    NearSingularError,
    NumericalError,
    QuadratureError,
    TriangulabError,
)
from .grid import (
    Grid,
    GridFunction,
    check_frequency,
    l2_inner,
    l2_norm,
    make_grid,
    max_frequency,
    sample_exponential,
    sample_function,
)
from .specfun import (
    EbetaSpec,
    e_beta,
    e_beta_cumulative,
    gamma_complex,
    m_moment,
    stirling_gamma_check,
)

__all__ = [
    "ConstructionError",
    "EbetaSpec",
    "FrequencyRangeError",
    "Grid",
    "GridFunction",
    "InsufficientDataError",
    "NearSingularError",
    "NumericalError",
    "QuadratureError",
    "TriangulabError",
    "check_frequency",
    "e_beta",
    "e_beta_cumulative",
    "gamma_complex",
    "l2_inner",
    "l2_norm",
    "m_moment",
    "make_grid",
    "max_frequency",
    "sample_exponential",
    "sample_function",
    "stirling_gamma_check",
]
