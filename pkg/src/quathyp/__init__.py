"""Quaternionic hyperbolic geometry and hyperbolic simplex volume bounds.

Layering, bottom up:

- quaternion: scalar algebra.
- hermitian:  the signature-(n,1) quaternionic Hermitian space, its
              projective model, triple products and totally real triples.
- lines:      quaternionic/complex lines, orthogonal projections, the
              five-point reduction, the calibrated distance.
- realhyp:    real hyperbolic backend: distance-geometry embedding into
              the Klein model, signed simplex volume quadrature, the
              maximal-simplex constant, plane triangle areas.
- cocycle:    the degree-four volume cocycle pipeline, its invariance
              checks, the complex-plane analogue, and the sup search.
- cli:        command-line entry point over all of the above.
"""

from .quaternion import Quaternion, q_conj, q_inv, q_mul
from .hermitian import (
    GeometryError,
    DimensionMismatchError,
    DegenerateInputError,
    HVector,
    PointClass,
    ProjPoint,
    classify,
    herm,
    is_totally_real_triple,
    load_points,
    make_totally_real_triple,
    make_totally_real_tuple,
    normalize_lift,
    random_point,
    save_points,
    triple_product,
)
from .lines import (
    DegenerateLineError,
    IllConditionedError,
    PolarVector,
    SubLine,
    disc_to_klein_radius,
    dist,
    klein_to_disc_radius,
    line_through,
    polar_vector,
    project_to_line,
    project_via_polar,
    reduce_tuple,
)

__version__ = "0.1.0"

__all__ = [
    "Quaternion", "q_mul", "q_conj", "q_inv",
    "GeometryError", "DimensionMismatchError", "DegenerateInputError",
    "HVector", "PointClass", "ProjPoint",
    "herm", "classify", "normalize_lift", "triple_product",
    "is_totally_real_triple", "make_totally_real_triple",
    "make_totally_real_tuple", "random_point", "save_points", "load_points",
    "SubLine", "PolarVector", "DegenerateLineError", "IllConditionedError",
    "line_through", "polar_vector", "project_to_line", "project_via_polar",
    "reduce_tuple", "dist", "disc_to_klein_radius", "klein_to_disc_radius",
    "__version__",
]
