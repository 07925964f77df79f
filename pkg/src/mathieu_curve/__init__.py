"""Floquet exponents of the Mathieu equation from elliptic-curve period integrals.

Exact-series pipeline (u'' + (lambda - 2q cos 2z)u = 0, w = lambda/2q,
eps = q^(-1/2)): WKB densities on the curve y^2 = (x^2+lambda)^2 - 4q^2,
generating differential operators mapping the base period to higher WKB
periods, and series reversion producing both classical eigenvalue expansions.
Independent numerical oracles (monodromy, Hill matrix, contour quadrature)
cross-validate every symbolic claim.
"""

from .curve import (
    ALPHA,
    BETA,
    CurveParams,
    GeneratingOperator,
    alpha_base_series,
    apply_operator,
    beta_base_series,
    branch_points,
    dual_base_series,
    nu_series,
    operator_table,
)
from .exact_series import (
    NU,
    SIGMA,
    U,
    AsymptoticSeries,
    EpsilonSeries,
    GaussianRational,
    Rational,
    epsilon_reversion,
    rational_linear_solve,
)
from .matcher import (
    LargeQSeries,
    NuRationalSeries,
    determine_operator,
    invert_small_q,
    large_q_series,
    small_q_series,
)
from .oracle import (
    ContourSpec,
    FloquetResult,
    MonodromySetup,
    contour_integral_pm,
    hill_char_value,
    hyp2f1,
    monodromy_nu,
)
from .wkb import WkbDensity, wkb_density, wkb_eval

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "BETA",
    "AsymptoticSeries",
    "ContourSpec",
    "CurveParams",
    "EpsilonSeries",
    "FloquetResult",
    "GaussianRational",
    "GeneratingOperator",
    "LargeQSeries",
    "MonodromySetup",
    "NU",
    "NuRationalSeries",
    "Rational",
    "SIGMA",
    "U",
    "WkbDensity",
    "alpha_base_series",
    "apply_operator",
    "beta_base_series",
    "branch_points",
    "contour_integral_pm",
    "determine_operator",
    "dual_base_series",
    "epsilon_reversion",
    "hill_char_value",
    "hyp2f1",
    "invert_small_q",
    "large_q_series",
    "monodromy_nu",
    "nu_series",
    "operator_table",
    "rational_linear_solve",
    "small_q_series",
    "wkb_density",
    "wkb_eval",
]
