"""The degree-four volume cocycle on quaternionic hyperbolic space.

Evaluation pipeline for a 5-tuple of points: project the last three onto
the quaternionic line of the first two (the value is unchanged by that
projection), embed the five points on the line into the Klein model of
real hyperbolic 4-space by distance geometry, and integrate the volume
density over the straight simplex they span.  Tuples whose leading
triple lies in a totally real subspace integrate to zero, as do tuples
with repeated points.

Sign semantics: the embedding fixes signs deterministically per
evaluation, so signed values are comparable inside one embedding
(alternation, the six-term coboundary identity) while only |value| is
compared across separate embeddings or reduction lines.

The module also carries the complex-plane analogue (triangle areas on
complex lines, bounded by pi) and a derivative-free sup search over
tuples, which together exhibit the bound: no evaluation exceeds the
volume of the ideal regular 4-simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .hermitian import (
    DegenerateInputError,
    GeometryError,
    HVector,
    PointClass,
    ProjPoint,
    is_totally_real_triple,
    normalize_lift,
    random_point,
    random_unit_quaternion,
)
from .lines import (
    DegenerateLineError,
    dist,
    klein_to_disc_radius,
    line_through,
    project_to_line,
    reduce_tuple,
)
from .quaternion import Quaternion
from .realhyp import (
    QuadratureConfig,
    gram_embed,
    simplex_volume,
    triangle_area_h2,
    v4_const,
)

__all__ = [
    "CocycleValue",
    "SearchConfig",
    "SearchResult",
    "evaluate",
    "cross_line_check",
    "coboundary_check",
    "coboundary_terms",
    "evaluate_complex",
    "sup_search",
    "regular_tuple",
    "random_tuple",
]

BOUND_TOL = 1e-6


@dataclass
class CocycleValue:
    """Result of one cocycle evaluation with its diagnostics."""

    value: float
    abs_value: float
    line_used: tuple
    gram_residual: float
    quad_err: float
    degenerate: str | None = None
    bound_violation: bool = False
    info: dict = field(default_factory=dict)


def _zero_value(reason: str, line_used=(0, 1)) -> CocycleValue:
    return CocycleValue(0.0, 0.0, line_used, 0.0, 0.0, degenerate=reason)


def evaluate(points, quad: QuadratureConfig | None = None,
             totally_real_shortcut: bool = True,
             treal_tol: float = 1e-9,
             point_tol: float = 1e-9) -> CocycleValue:
    """Evaluate the cocycle on five points of quaternionic hyperbolic space.

    For ambient dimension 1 the reduction step is the identity.  The
    totally-real shortcut returns an exact zero when the first three
    points span a totally real subspace (sufficient for vanishing
    whatever the remaining two are); disable it to exercise the geometric
    path, which then produces a degenerate straight simplex.
    """
    pts = list(points)
    if len(pts) != 5:
        raise DegenerateInputError("the cocycle takes exactly five points")
    for p in pts:
        if p.cls is not PointClass.NEGATIVE:
            raise DegenerateInputError("evaluation requires interior points")
    for i in range(5):
        for j in range(i + 1, 5):
            if pts[i].approx_eq(pts[j], point_tol):
                return _zero_value(f"repeated point ({i}, {j})")
    if totally_real_shortcut and is_totally_real_triple(
            pts[0], pts[1], pts[2], treal_tol):
        return _zero_value("leading triple is totally real")

    if pts[0].n == 1:
        reduced, line_used, residual = pts, (0, 1), 0.0
    else:
        try:
            reduced, _, residual = reduce_tuple(pts)
        except DegenerateLineError:
            return _zero_value("first two points coincide")
        line_used = (0, 1)

    quad = quad or QuadratureConfig()
    klein, info = gram_embed(reduced, target_dim=4)
    value, quad_err = simplex_volume(klein, quad)
    gram_residual = max(residual, info["distance_defect"], info["residual"])
    out = CocycleValue(
        value=value,
        abs_value=abs(value),
        line_used=line_used,
        gram_residual=gram_residual,
        quad_err=quad_err,
        info=info,
    )
    if out.abs_value > v4_const() + BOUND_TOL + quad_err:
        # the bound is the claim under test: monitor loudly, never clamp
        out.bound_violation = True
    return out


def cross_line_check(points, quad: QuadratureConfig | None = None,
                     all_pairs: bool = False, floor: float = 1e-6) -> float:
    """Reduce onto different lines and compare |value|.

    Evaluates the tuple reducing onto the line of points (0,1) and of
    points (2,3) (all ten pairs if requested) and returns the maximum
    relative discrepancy, with an absolute floor in the denominator for
    near-vanishing values.  Agreement is the executable witness that the
    projection step does not change the cocycle.
    """
    pts = list(points)
    if len(pts) != 5:
        raise DegenerateInputError("expected a five-point tuple")
    pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)] if all_pairs \
        else [(0, 1), (2, 3)]
    values = []
    for (i, j) in pairs:
        order = [i, j] + [k for k in range(5) if k not in (i, j)]
        values.append(evaluate([pts[k] for k in order], quad,
                               totally_real_shortcut=False).abs_value)
    lo, hi = min(values), max(values)
    return (hi - lo) / max(hi, floor)


def coboundary_terms(points, quad: QuadratureConfig | None = None):
    """Signed volumes of the six faces of a six-point tuple on one line.

    All six points are embedded at once so the signs share one
    orientation convention.  Returns (terms, normalized_alternating_sum):
    terms[i] is the face omitting vertex i, and the sum
    |sum_i (-1)^i terms[i]| is normalized by the maximal simplex volume.
    """
    pts = list(points)
    if len(pts) != 6:
        raise DegenerateInputError("the coboundary check takes six points")
    quad = quad or QuadratureConfig(tol=1e-8)
    klein, _ = gram_embed(pts, target_dim=4)
    terms = []
    for i in range(6):
        face = np.delete(klein, i, axis=0)
        val, _ = simplex_volume(face, quad)
        terms.append(val)
    alt = math.fsum((-1) ** i * t for i, t in enumerate(terms))
    return terms, abs(alt) / v4_const()


def coboundary_check(points, quad: QuadratureConfig | None = None) -> float:
    """|six-term alternating face sum| / (maximal simplex volume)."""
    _, normalized = coboundary_terms(points, quad)
    return normalized


def evaluate_complex(points, quad: QuadratureConfig | None = None,
                     point_tol: float = 1e-9) -> float:
    """Signed triangle area of a complex three-point tuple.

    Projects the third point onto the complex line of the first two,
    embeds the three points into the hyperbolic plane by the same
    distance-geometry method (signature (2,1)), and integrates the plane
    density over the straight triangle.  |value| < pi always.
    """
    pts = list(points)
    if len(pts) != 3:
        raise DegenerateInputError("the plane analogue takes three points")
    for p in pts:
        if not p.is_complex():
            raise DegenerateInputError("points must lie in the complex subalgebra")
        if p.cls is not PointClass.NEGATIVE:
            raise DegenerateInputError("evaluation requires interior points")
    if pts[0].approx_eq(pts[1], point_tol) or pts[0].approx_eq(pts[2], point_tol) \
            or pts[1].approx_eq(pts[2], point_tol):
        return 0.0
    line = line_through(pts[0], pts[1], "complex")
    third = project_to_line(pts[2], line)
    triple = [pts[0], pts[1], third]
    klein, _ = gram_embed(triple, target_dim=2)
    quad = quad or QuadratureConfig()
    value, _ = triangle_area_h2(klein, quad)
    return value


# -- tuple generators -------------------------------------------------------

def random_tuple(n: int, r_max: float = 0.8, rng=None, seed=None,
                 field_name: str = "quaternion", size: int = 5):
    """A tuple of independent random interior points."""
    if rng is None:
        rng = np.random.default_rng(seed)
    return tuple(random_point(n, r_max, rng, field_name=field_name)
                 for _ in range(size))


def regular_tuple(n: int, klein_radius: float, rng=None, seed=None):
    """Five points on one quaternionic line in a regular configuration.

    The configuration embeds as a centered regular 4-simplex of the given
    Klein radius.  The carrying line passes through the origin with a
    random unit direction (and a random rotation of the disc coordinate),
    so repeated draws exercise different lifts of the same shape.
    """
    from .realhyp import regular_simplex  # local import to avoid cycles at import time

    if rng is None:
        rng = np.random.default_rng(seed)
    rho = klein_to_disc_radius(klein_radius)
    dirs = regular_simplex(1.0, dim=4)
    a = rng.normal(size=4 * n)
    a /= np.linalg.norm(a)
    direction = [Quaternion(*a[4 * i:4 * i + 4]) for i in range(n)]
    u = random_unit_quaternion(rng)
    v = random_unit_quaternion(rng)
    pts = []
    for d in dirs:
        q = u * Quaternion(*d) * v.conj() * rho
        entries = [dq * q for dq in direction] + [Quaternion(1.0)]
        pts.append(normalize_lift(HVector(entries)))
    return tuple(pts)


# -- sup search --------------------------------------------------------------

@dataclass
class SearchConfig:
    """Budget and schedule for the derivative-free sup search."""

    n: int = 2
    seed: int = 0
    restarts: int = 200
    iters: int = 500
    eps_schedule: tuple = (1e-2, 1e-3, 1e-4, 1e-5)
    restart_radius: tuple = (0.3, 0.95)
    structured_every: int = 5
    quad_tol_search: float = 1e-4
    max_cells_search: int = 200_000
    quad_tol_final: float = 1e-6
    seed_regular: bool = False
    bound_tol: float = BOUND_TOL

    def to_dict(self) -> dict:
        return {
            "n": self.n, "seed": self.seed, "restarts": self.restarts,
            "iters": self.iters, "eps_schedule": list(self.eps_schedule),
            "restart_radius": list(self.restart_radius),
            "structured_every": self.structured_every,
            "quad_tol_search": self.quad_tol_search,
            "max_cells_search": self.max_cells_search,
            "quad_tol_final": self.quad_tol_final,
            "seed_regular": self.seed_regular, "bound_tol": self.bound_tol,
        }


@dataclass
class SearchResult:
    best_value: float
    best_tuple: tuple
    trajectory: list
    evaluations: int
    bound_violation: bool
    best_diagnostics: CocycleValue | None = None


def _tuple_to_coords(points) -> np.ndarray:
    out = []
    for p in points:
        for q in p.disc_coords():
            out.extend((q.w, q.x, q.y, q.z))
    return np.array(out)


def _coords_to_tuple(x: np.ndarray, n: int, cap: float):
    pts = []
    per = 4 * n
    for i in range(5):
        block = np.array(x[per * i: per * (i + 1)], dtype=float)
        norm = float(np.linalg.norm(block))
        if norm > cap:
            block *= cap / norm
        entries = [Quaternion(*block[4 * k: 4 * k + 4]) for k in range(n)]
        entries.append(Quaternion(1.0))
        pts.append(normalize_lift(HVector(entries)))
    return tuple(pts)


def sup_search(cfg: SearchConfig) -> SearchResult:
    """Two-phase global search for the supremum of |cocycle|.

    Phase one draws seeded restarts on a radius schedule pushing toward
    the boundary, mixing uniform tuples with regular-configuration
    templates on random lines (informed restarts; the bound holds for
    any tuple, so seeding with good shapes only sharpens the attained
    value).  Phase two runs simplex-reflection refinement on the flat
    disc coordinates, clamped to radius 1 - eps with eps decreasing on
    the schedule.  The best tuple is re-evaluated at the final quadrature
    tolerance; a value beyond the ideal-simplex bound raises a violation
    flag in the result rather than being clamped.
    """
    rng = np.random.default_rng(cfg.seed)
    quad = QuadratureConfig(tol=cfg.quad_tol_search,
                            max_cells=cfg.max_cells_search)

    state = {"best": -1.0, "tuple": None, "evals": 0}
    trajectory = []

    def try_tuple(pts):
        state["evals"] += 1
        try:
            val = evaluate(pts, quad).abs_value
        except GeometryError:
            val = 0.0
        if val > state["best"]:
            state["best"] = val
            state["tuple"] = pts
        return val

    # phase one: restarts
    r_lo, r_hi = cfg.restart_radius
    if cfg.seed_regular:
        cap = 1.0 - max(cfg.eps_schedule[0], 1e-7)
        try_tuple(regular_tuple(cfg.n, disc_to_klein(cap), rng))
        trajectory.append(state["best"])
    for m in range(cfg.restarts):
        frac = m / max(cfg.restarts - 1, 1)
        radius = r_lo + (r_hi - r_lo) * frac
        if cfg.structured_every and m % cfg.structured_every == 0:
            pts = regular_tuple(cfg.n, disc_to_klein(radius), rng)
        else:
            pts = random_tuple(cfg.n, radius, rng)
        try_tuple(pts)
        trajectory.append(state["best"])

    # phase two: simplex-reflection refinement under a shrinking radius cap
    if cfg.iters > 0 and state["tuple"] is not None:
        stages = len(cfg.eps_schedule)
        iters_per = max(cfg.iters // max(stages, 1), 1)
        x0 = _tuple_to_coords(state["tuple"])
        for eps in cfg.eps_schedule:
            cap = 1.0 - max(eps, 1e-7)

            def neg_objective(x, _cap=cap):
                state["evals"] += 1
                try:
                    pts = _coords_to_tuple(x, cfg.n, _cap)
                    return -evaluate(pts, quad).abs_value
                except GeometryError:
                    return 0.0

            res = minimize(neg_objective, x0, method="Nelder-Mead",
                           options={"maxiter": iters_per,
                                    "xatol": 1e-10, "fatol": 1e-12,
                                    "adaptive": True})
            x0 = res.x
            pts = _coords_to_tuple(x0, cfg.n, cap)
            try_tuple(pts)
            trajectory.append(state["best"])

    if state["tuple"] is None:
        return SearchResult(0.0, tuple(), trajectory, state["evals"], False)

    final_quad = QuadratureConfig(tol=cfg.quad_tol_final)
    final = evaluate(state["tuple"], final_quad)
    violation = final.abs_value > v4_const() + cfg.bound_tol + final.quad_err
    return SearchResult(final.abs_value, state["tuple"], trajectory,
                        state["evals"], violation, final)


def disc_to_klein(rho: float) -> float:
    """Klein radius reached by a disc-coordinate radius (clipped to < 1)."""
    from .lines import disc_to_klein_radius
    return min(disc_to_klein_radius(rho), 1.0 - 1e-12)
