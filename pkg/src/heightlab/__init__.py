"""Canonical heights and equidistribution laboratory for rank-1 torus
extensions of elliptic curves.

Core layers: exact algebraic numbers and toric heights (algnum), the Tate
limit engine (dynamics), elliptic curves with period lattices and Neron-Tate
heights (elliptic), the extension model with its additive Weil function and
isogeny ladder (semiabelian), canonical measures (measures), and the
equidistribution experiment engine (equidist).  An HTTP service wraps the
package (heightlab.service); the CLI is a thin client over it.
"""

__version__ = "0.1.0"

from .algnum import (
    AlgebraicNumber,
    IntPoly,
    complex_roots,
    primitive_roots_of_unity,
    toric_canonical_height,
    weil_height,
)
from .dynamics import (
    DynamicalHeightProblem,
    PotentialGrid,
    canonical_potential_iterate,
    isometry_residual,
    tate_limit,
)
from .elliptic import CurveQ, EllipticModel, EPoint, PeriodLattice, periods
from .equidist import (
    EquidistReport,
    Orbit,
    OrbitSpec,
    empirical_average,
    generate_orbit,
    ladder_height_experiment,
    run_equidist,
)
from .measures import (
    CanonicalMeasure,
    MonteCarloStrategy,
    QuadratureStrategy,
    TestFunction,
    g_canonical_integral,
    ladder_measure_check,
    p1_canonical_mass,
    pushforward_projection_check,
    s1_haar_integral,
)
from .semiabelian import (
    GModel,
    GPoint,
    LadderLevel,
    alpha_m,
    build_extension,
    ladder_level,
    phi_n,
    point_height_ladder,
)

__all__ = [
    "AlgebraicNumber", "IntPoly", "complex_roots", "primitive_roots_of_unity",
    "toric_canonical_height", "weil_height",
    "DynamicalHeightProblem", "PotentialGrid", "canonical_potential_iterate",
    "isometry_residual", "tate_limit",
    "CurveQ", "EllipticModel", "EPoint", "PeriodLattice", "periods",
    "GModel", "GPoint", "LadderLevel", "alpha_m", "build_extension",
    "ladder_level", "phi_n", "point_height_ladder",
    "CanonicalMeasure", "MonteCarloStrategy", "QuadratureStrategy", "TestFunction",
    "g_canonical_integral", "ladder_measure_check", "p1_canonical_mass",
    "pushforward_projection_check", "s1_haar_integral",
    "EquidistReport", "Orbit", "OrbitSpec", "empirical_average", "generate_orbit",
    "ladder_height_experiment", "run_equidist",
]
