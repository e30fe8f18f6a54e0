"""Max-type quasimetric geometry on probability simplices.

Asymmetric distances D(p, q) = max_i (f(q_i) - f(p_i)) for increasing
bijections f of [0,1], with ball geometry, curve lengths, a Finsler layer,
constructive geodesics, and bistochastic monotonicity checks.
"""

__version__ = "0.1.0"

from .core import (
    GeneratorFunction,
    ProbVector,
    TangentVector,
    bisection_inverse,
    chebyshev,
    custom_generator,
    euclidean,
    generator,
    make_prob_vector,
    parse_generator,
    random_point,
    random_tangent,
    tangent,
    uniform_point,
    validate_generator,
    vertex,
)
from .curves import (
    Curve,
    GeodesicCheck,
    LengthResult,
    Partition,
    backward_length,
    concat,
    constant_curve,
    forward_length,
    is_f_geodesic,
    is_f_pregeodesic,
    length_details,
    length_profile,
    partition_sum,
    polyline,
    reparametrize,
    reparametrize_by_flength,
    restrict,
    reverse,
    segment,
)
from .finsler import (
    ChordCheckReport,
    FinslerAxiomReport,
    FinslerEvaluation,
    bm_derivative,
    finsler_F,
    finsler_axioms_check,
    finsler_length,
    uniform_chord_check,
)
from .geodesic import (
    BackwardGeodesic,
    Geodesic,
    backward_geodesic,
    geodesic_grid_batch,
    make_geodesic,
    mu_derivative,
    solve_mu,
)
from .quasimetric import (
    BallGeometry,
    BallSpec,
    BoundsCheck,
    ball_boundary_polyline,
    ball_contains,
    ball_contains_by_distance,
    ball_coordinate_bounds,
    ball_geometry,
    chebyshev_bounds_check,
    quasi_dist,
    quasi_dist_argmax,
    symmetrize_max,
    symmetrize_power,
)
from .stochastic import (
    BirkhoffDecomposition,
    BistochasticMatrix,
    CounterexampleReport,
    MonotoneCheck,
    StochasticMatrix,
    apply,
    apply_tangent,
    birkhoff_decompose,
    check_dist_monotone,
    check_finsler_monotone,
    is_bistochastic,
    max_mean_inequality_check,
    permutation_matrix,
    random_bistochastic,
    stochastic_counterexample,
)

from . import errors  # noqa: F401  (re-exported as a namespace)
