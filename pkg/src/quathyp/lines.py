"""Quaternionic and complex lines: rank-2 right-submodules and projections.

A line is spanned by two independent lifts and carries an orthogonalized
basis (e_minus, e_plus) with Gram matrix diag(-1, +1) under the indefinite
form.  Orthogonal projection onto the line is a small noncommutative
linear solve; for ambient dimension 2 the same projection can be written
through the positive polar vector of the line, which this module also
provides as an independent cross-check route.

The calibrated distance function lives here too:

    cosh(d(p, q) / 2) = |<p, q>| / sqrt(<p, p> <q, q>)

with lifts of interior points.  This normalization makes quaternionic
lines isometric to real hyperbolic 4-space of curvature -1 (and complex
lines to the curvature -1 hyperbolic plane); the Gram-signature
embedding test is the arbiter of that calibration and is part of the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hermitian import (
    DegenerateInputError,
    GeometryError,
    HVector,
    PointClass,
    ProjPoint,
    classify,
    herm,
    normalize_lift,
)
from .quaternion import Quaternion

__all__ = [
    "DegenerateLineError",
    "IllConditionedError",
    "SubLine",
    "PolarVector",
    "line_through",
    "polar_vector",
    "project_to_line",
    "project_via_polar",
    "reduce_tuple",
    "dist",
    "disc_to_klein_radius",
    "klein_to_disc_radius",
]

# Gram solves with condition estimate beyond this are refused.
CONDITION_LIMIT = 1e8


class DegenerateLineError(GeometryError):
    pass


class IllConditionedError(GeometryError):
    pass


@dataclass
class SubLine:
    """A rank-2 right-submodule with orthonormalized indefinite basis.

    e_minus has self-form -1 and is proportional to the first defining
    point's lift, e_plus has self-form +1, and the two are orthogonal.
    scalar_field records whether coefficients range over the quaternions
    or the embedded complex subalgebra; the complex span of two points
    is strictly smaller than their quaternionic span, so this is never
    inferred from the data.
    """

    e_minus: HVector
    e_plus: HVector
    scalar_field: str
    gram_residual: float

    @property
    def n(self) -> int:
        return self.e_minus.n

    def basis_residual(self, z: HVector) -> float:
        """Norm of the component of z orthogonal to the span, relative to |z|."""
        lam1, lam2 = _gram_solve_2(self, z)
        rec = self.e_minus.right_scaled(lam1) + self.e_plus.right_scaled(lam2)
        diff = z - rec
        scale = math.sqrt(max(z.euclid_norm2(), 1e-300))
        return math.sqrt(diff.euclid_norm2()) / scale

    def contains(self, p: ProjPoint, tol: float = 1e-9) -> bool:
        return self.basis_residual(p.lift) <= tol


@dataclass
class PolarVector:
    """The positive vector whose orthogonal complement cuts out a line (n = 2)."""

    c: HVector


def line_through(p: ProjPoint, q: ProjPoint,
                 scalar_field: str = "quaternion") -> SubLine:
    """The line spanned by two distinct interior points.

    Deterministic Gram-Schmidt in the indefinite form: e_minus is the
    normalized lift of p (so p sits at the line's origin), e_plus is built
    from q's lift with its e_minus-component removed.  Scalar coefficients
    act on the right throughout.
    """
    if scalar_field not in ("quaternion", "complex"):
        raise ValueError(f"unknown scalar field {scalar_field!r}")
    if p.cls is not PointClass.NEGATIVE or q.cls is not PointClass.NEGATIVE:
        raise DegenerateInputError("lines are spanned by interior points")
    if scalar_field == "complex" and not (p.is_complex() and q.is_complex()):
        raise DegenerateInputError("complex line through non-complex points")
    if p.approx_eq(q):
        raise DegenerateLineError("coincident points span no line")

    ph, qh = p.lift, q.lift
    s_minus = herm(ph, ph).w
    e_minus = ph.right_scaled(Quaternion(1.0 / math.sqrt(-s_minus)))

    g = herm(qh, e_minus)
    f = qh + e_minus.right_scaled(g)
    s_plus = herm(f, f).w
    scale = abs(herm(qh, qh).w) + g.norm2()
    if s_plus <= scale / CONDITION_LIMIT:
        raise IllConditionedError(
            "spanning lifts are numerically dependent (positive part lost)")
    e_plus = f.right_scaled(Quaternion(1.0 / math.sqrt(s_plus)))

    residual = max(
        abs(herm(e_minus, e_minus).w + 1.0),
        abs(herm(e_plus, e_plus).w - 1.0),
        herm(e_plus, e_minus).norm(),
    )
    return SubLine(e_minus, e_plus, scalar_field, residual)


def _gram_solve_2(L: SubLine, z: HVector):
    """Solve <e_b, e_a> lam_b = <z, e_a> for the right-coefficients lam.

    The coefficient quaternions multiply the unknowns from the left, so
    this is plain noncommutative elimination with pivoting on the larger
    leading coefficient.
    """
    basis = (L.e_minus, L.e_plus)
    g = [[herm(basis[b], basis[a]) for b in range(2)] for a in range(2)]
    b = [herm(z, basis[a]) for a in range(2)]
    if g[0][0].norm() < g[1][0].norm():
        g[0], g[1] = g[1], g[0]
        b[0], b[1] = b[1], b[0]
    pivot = g[0][0]
    if pivot.norm() == 0.0:
        raise IllConditionedError("singular Gram matrix")
    pinv = pivot.inverse()
    # Schur complement of the pivot
    schur = g[1][1] - g[1][0] * pinv * g[0][1]
    rhs = b[1] - g[1][0] * pinv * b[0]
    if schur.norm() <= pivot.norm() / CONDITION_LIMIT:
        raise IllConditionedError("ill-conditioned Gram matrix")
    lam2 = schur.inverse() * rhs
    lam1 = pinv * (b[0] - g[0][1] * lam2)
    return lam1, lam2


def project_to_line(z: ProjPoint, L: SubLine) -> ProjPoint:
    """Orthogonal projection of an interior point onto a line.

    Solves the 2x2 quaternionic Gram system for the basis coefficients
    of the projected lift; the remainder is orthogonal to the line.  The
    projected lift of an interior point is always negative (the
    orthogonal complement of the line is positive definite), which is
    asserted rather than assumed.
    """
    lam1, lam2 = _gram_solve_2(L, z.lift)
    proj = L.e_minus.right_scaled(lam1) + L.e_plus.right_scaled(lam2)
    if classify(proj) is not PointClass.NEGATIVE:
        raise GeometryError(
            "projected lift left the negative cone; line or point data invalid")
    return normalize_lift(proj)


def polar_vector(L: SubLine) -> PolarVector:
    """The positive vector orthogonal to a line in ambient dimension 2.

    Solves conj(c)_i a_i = 0 against both basis vectors by noncommutative
    elimination (unknowns multiply from the left after conjugation), then
    fixes the scale so <c, c> = 1 and the largest entry is real positive.
    """
    if L.n != 2:
        raise GeometryError("polar vectors exist only in ambient dimension 2")
    if L.scalar_field != "quaternion":
        raise GeometryError("polar vectors are defined for quaternionic lines")

    def signed(vec):
        # absorb the form's signature into the coefficients
        return [vec.entries[0], vec.entries[1], -vec.entries[2]]

    a = signed(L.e_minus)
    b = signed(L.e_plus)
    # d_i = conj(c_i); solve d.a = d.b = 0 with d_free = 1 at the pivot slot
    best = None
    for free in range(3):
        idx = [i for i in range(3) if i != free]
        a0, a1 = a[idx[0]], a[idx[1]]
        b0, b1 = b[idx[0]], b[idx[1]]
        # d0*a0 + d1*a1 = -a_free ; d0*b0 + d1*b1 = -b_free
        if a0.norm() < b0.norm():
            a0, a1, b0, b1 = b0, b1, a0, a1
            rhs0, rhs1 = -b[free], -a[free]
        else:
            rhs0, rhs1 = -a[free], -b[free]
        if a0.norm() == 0.0:
            continue
        ainv = a0.inverse()
        # unknowns multiply the coefficients from the LEFT:
        # d0*a0 + d1*a1 = rhs0 ; d0*b0 + d1*b1 = rhs1
        # eliminate d0 = (rhs0 - d1*a1) * a0^{-1}:
        # d1*(b1 - a1*a0^{-1}*b0) = rhs1 - rhs0*a0^{-1}*b0
        schur = b1 - a1 * ainv * b0
        if schur.norm() <= a0.norm() / CONDITION_LIMIT:
            continue
        d1 = (rhs1 - rhs0 * ainv * b0) * schur.inverse()
        d0 = (rhs0 - d1 * a1) * ainv
        d = [None, None, None]
        d[idx[0]], d[idx[1]], d[free] = d0, d1, Quaternion(1.0)
        cand = HVector([q.conj() for q in d])
        score = max(herm(L.e_minus, cand).norm(), herm(L.e_plus, cand).norm())
        if best is None or score < best[0]:
            best = (score, cand)
    if best is None:
        raise IllConditionedError("polar solve failed on every pivot choice")
    c = best[1]
    s = herm(c, c).w
    if s <= 0:
        raise GeometryError("polar vector is not positive; line data invalid")
    c = c.right_scaled(Quaternion(1.0 / math.sqrt(s)))
    # deterministic right phase: make the largest entry real positive
    k = max(range(3), key=lambda i: c.entries[i].norm())
    lead = c.entries[k]
    c = c.right_scaled(lead.conj() / lead.norm())
    return PolarVector(c)


def project_via_polar(z: ProjPoint, pol: PolarVector) -> ProjPoint:
    """Projection through the polar vector: z - c * (<z,c>/<c,c>).

    The scalar multiplies c on the right; that is the unique order making
    the remainder orthogonal to c under the right-module convention.
    """
    c = pol.c
    t = herm(z.lift, c) / herm(c, c).w
    proj = z.lift - c.right_scaled(t)
    return normalize_lift(proj)


def reduce_tuple(points, scalar_field: str = "quaternion"):
    """Project the last three of five points onto the line of the first two.

    Returns (reduced_points, line, max_residual); the first two points are
    untouched and every output point lies on the line up to the reported
    Gram-reconstruction residual.
    """
    if len(points) != 5:
        raise DegenerateInputError("reduction expects exactly five points")
    p0, p1 = points[0], points[1]
    if p0.approx_eq(p1):
        raise DegenerateLineError("first two points coincide; caller treats as 0")
    L = line_through(p0, p1, scalar_field)
    reduced = [p0, p1] + [project_to_line(p, L) for p in points[2:]]
    residual = max(L.basis_residual(p.lift) for p in reduced)
    return reduced, L, residual


def dist(p: ProjPoint, q: ProjPoint) -> float:
    """Hyperbolic distance between interior points (curvature -1 on lines).

    Boundary points signal infinite distance.
    """
    if p.cls is PointClass.NULL or q.cls is PointClass.NULL:
        return math.inf
    if p.cls is not PointClass.NEGATIVE or q.cls is not PointClass.NEGATIVE:
        raise DegenerateInputError("distance requires interior (or boundary) points")
    num = herm(p.lift, q.lift).norm()
    den = math.sqrt(p.self_form() * q.self_form())
    ratio = num / den
    if ratio < 1.0:
        ratio = 1.0
    return 2.0 * math.acosh(ratio)


def disc_to_klein_radius(rho: float) -> float:
    """Klein-model radius of a point with disc-coordinate norm rho."""
    return math.tanh(2.0 * math.atanh(rho)) if rho < 1.0 else 1.0


def klein_to_disc_radius(r: float) -> float:
    """Disc-coordinate norm of a point at Klein-model radius r."""
    return math.tanh(0.5 * math.atanh(r)) if r < 1.0 else 1.0
