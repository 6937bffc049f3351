"""The indefinite quaternionic Hermitian space and its projective model.

Vectors live in H^{n+1} equipped with the signature-(n,1) form

    <z, w> = conj(w_1) z_1 + ... + conj(w_n) z_n - conj(w_{n+1}) z_{n+1},

a right quaternionic module: scalars act on the right, the form is
right-linear in its first slot (<z*a, w> = <z, w>*a) and conjugate-left
in the second (<z, w*b> = conj(b)*<z, w>).  Projectivizing the negative
cone by right scalars gives quaternionic hyperbolic n-space; interior
points are represented by lifts normalized to last entry 1.

The triple product of three points is the three pairwise form values
multiplied in the unique cyclic order that makes its realness
independent of the choice of lifts; realness characterizes triples
contained in a totally real subspace.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .quaternion import Quaternion

__all__ = [
    "GeometryError",
    "DimensionMismatchError",
    "DegenerateInputError",
    "HVector",
    "PointClass",
    "ProjPoint",
    "herm",
    "classify",
    "normalize_lift",
    "triple_product",
    "is_totally_real_triple",
    "make_totally_real_triple",
    "make_totally_real_tuple",
    "random_point",
    "random_unit_quaternion",
    "save_points",
    "load_points",
]


class GeometryError(Exception):
    """Base class for geometric failures in this package."""


class DimensionMismatchError(GeometryError):
    pass


class DegenerateInputError(GeometryError):
    pass


def _as_quaternion(v) -> Quaternion:
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, (int, float)):
        return Quaternion(v)
    if isinstance(v, complex):
        return Quaternion.from_complex(v)
    return Quaternion.from_array(v)


class HVector:
    """A column vector of n+1 quaternions; the lift of a projective point.

    Supports the right scalar action (z*a)_i = z_i * a and entrywise
    addition; these are the only vector operations the geometry needs.
    """

    __slots__ = ("entries", "n")

    def __init__(self, entries):
        self.entries = tuple(_as_quaternion(e) for e in entries)
        if len(self.entries) < 2:
            raise DimensionMismatchError("need at least 2 entries (ambient n >= 1)")
        self.n = len(self.entries) - 1

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def right_scaled(self, a: Quaternion) -> "HVector":
        a = _as_quaternion(a)
        return HVector([e * a for e in self.entries])

    def __add__(self, other: "HVector") -> "HVector":
        self._check_dim(other)
        return HVector([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "HVector") -> "HVector":
        self._check_dim(other)
        return HVector([a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return HVector([-a for a in self.entries])

    def euclid_norm2(self) -> float:
        return sum(e.norm2() for e in self.entries)

    def is_complex(self, tol: float = 1e-9) -> bool:
        return all(e.is_complex(tol) for e in self.entries)

    def _check_dim(self, other):
        if len(other) != len(self):
            raise DimensionMismatchError(
                f"vector lengths differ: {len(self)} vs {len(other)}")

    def to_arrays(self):
        return [e.to_array() for e in self.entries]

    @classmethod
    def from_arrays(cls, arrays) -> "HVector":
        return cls([Quaternion.from_array(a) for a in arrays])

    def __repr__(self):
        return f"HVector({list(self.entries)!r})"


class PointClass(Enum):
    NEGATIVE = "negative"
    NULL = "null"
    POSITIVE = "positive"


def herm(z: HVector, w: HVector) -> Quaternion:
    """The signature-(n,1) Hermitian form <z, w>.

    Right-linear in z, conjugate-left in w, and <w, z> = conj(<z, w>).
    """
    if len(z) != len(w):
        raise DimensionMismatchError(
            f"form needs equal lengths, got {len(z)} and {len(w)}")
    acc = Quaternion(0.0)
    last = len(z) - 1
    for i in range(last):
        acc = acc + w.entries[i].conj() * z.entries[i]
    return acc - w.entries[last].conj() * z.entries[last]


def classify(z: HVector, tol: float = 1e-9) -> PointClass:
    """Sign class of <z, z>; values within tol * |z|^2 of zero are null."""
    scale = z.euclid_norm2()
    if scale == 0.0:
        raise DegenerateInputError("cannot classify the zero vector")
    s = herm(z, z).w
    if abs(s) <= tol * scale:
        return PointClass.NULL
    return PointClass.NEGATIVE if s < 0 else PointClass.POSITIVE


@dataclass
class ProjPoint:
    """A projective point: a lift plus its sign class.

    Interior (negative) points always carry the lift normalized to last
    entry exactly 1; null lifts with vanishing last entry are kept as
    given, since no disc coordinates exist for them.
    """

    lift: HVector
    cls: PointClass
    _self_form: float | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.lift.n

    def self_form(self) -> float:
        """<lift, lift>, cached; real by conjugate symmetry."""
        if self._self_form is None:
            self._self_form = herm(self.lift, self.lift).w
        return self._self_form

    def disc_coords(self):
        """First n entries of the normalized lift (interior points only)."""
        if self.cls is not PointClass.NEGATIVE:
            raise DegenerateInputError("disc coordinates exist for interior points only")
        return self.lift.entries[:-1]

    def approx_eq(self, other: "ProjPoint", tol: float = 1e-9) -> bool:
        if len(self.lift) != len(other.lift):
            return False
        return all(a.approx_eq(b, tol)
                   for a, b in zip(self.lift.entries, other.lift.entries))

    def is_complex(self, tol: float = 1e-9) -> bool:
        return self.lift.is_complex(tol)


def normalize_lift(z: HVector, tol: float = 1e-9) -> ProjPoint:
    """Right-scale a lift by the inverse of its last entry.

    Interior and any other lift with a nonzero last entry come out with
    last entry exactly 1; null lifts with zero last entry are retained
    unnormalized.  The projective class is unchanged because the scaling
    acts on the right.
    """
    cls = classify(z, tol)
    last = z.entries[-1]
    scale = math.sqrt(z.euclid_norm2())
    if last.norm() <= tol * scale:
        if cls is PointClass.NEGATIVE:
            # <z,z> < 0 forces |z_{n+1}|^2 > sum of the rest; unreachable
            raise GeometryError("negative vector with vanishing last entry")
        return ProjPoint(z, cls)
    w = z.right_scaled(last.inverse())
    entries = list(w.entries)
    entries[-1] = Quaternion(1.0)
    return ProjPoint(HVector(entries), cls)


def triple_product(u: HVector, v: HVector, w: HVector) -> Quaternion:
    """Product of the three pairwise form values of a triple of lifts.

    The factors are multiplied as <w,u> * <v,w> * <u,v>, the cyclic
    order in which right-rescaling any lift only conjugates the value
    and scales it by a positive real.  Realness of the result is
    therefore a property of the three projective points, and holds
    exactly when they lie in a common totally real subspace.
    """
    return herm(w, u) * herm(v, w) * herm(u, v)


def is_totally_real_triple(u: ProjPoint, v: ProjPoint, w: ProjPoint,
                           tol: float = 1e-9) -> bool:
    """True when the triple product is real relative to its magnitude.

    Coincident points make the span degenerate into a real span, so any
    triple with two equal points reports True.
    """
    t = triple_product(u.lift, v.lift, w.lift)
    mag = t.norm()
    if mag == 0.0:
        return True
    return t.imag_norm() <= tol * mag


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return Quaternion(v[0], v[1], v[2], v[3])


def random_point(n: int, r_max: float = 0.8, rng=None, seed=None,
                 field_name: str = "quaternion") -> ProjPoint:
    """A random interior point with disc-coordinate norm <= r_max.

    Deterministic for a fixed seed (or caller-supplied generator).
    Sampling is uniform in the coordinate ball of radius r_max; with
    field_name="complex" the j and k parts are zero, staying inside the
    complex subalgebra.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    dim = 4 * n if field_name == "quaternion" else 2 * n
    if r_max < 0 or r_max >= 1:
        raise DegenerateInputError("r_max must lie in [0, 1)")
    if r_max == 0.0:
        coords = np.zeros(4 * n)
    else:
        v = rng.normal(size=dim)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            v[0] = 1.0
            norm = 1.0
        radius = r_max * rng.random() ** (1.0 / dim)
        v = v / norm * radius
        if field_name == "complex":
            full = np.zeros((n, 4))
            full[:, 0] = v[0::2]
            full[:, 1] = v[1::2]
            coords = full.ravel()
        else:
            coords = v
    entries = [Quaternion(*coords[4 * i:4 * i + 4]) for i in range(n)]
    entries.append(Quaternion(1.0))
    return normalize_lift(HVector(entries))


def _realify_against(y: HVector, basis: list[HVector]) -> HVector:
    """Subtract a right-combination of basis vectors so that the form of
    the result against every basis vector is real.

    Requires the basis to already have pairwise real form values; the
    imaginary components then satisfy a real linear system (one copy per
    imaginary axis, all sharing the real Gram matrix of the basis).
    """
    k = len(basis)
    gram = np.empty((k, k))
    for a in range(k):
        for b in range(k):
            val = herm(basis[b], basis[a])
            gram[a, b] = val.w
    rhs = np.empty((k, 3))
    for a in range(k):
        val = herm(y, basis[a])
        rhs[a] = (val.x, val.y, val.z)
    coeffs = np.linalg.solve(gram, rhs)
    out = y
    for b in range(k):
        out = out - basis[b].right_scaled(Quaternion(0.0, *coeffs[b]))
    return out


def make_totally_real_triple(n: int, rng=None, seed=None, r_max: float = 0.7,
                             max_attempts: int = 200):
    """Three random interior points contained in one totally real subspace.

    Built by taking random lifts and subtracting, from the second and
    third, the right-combination of the earlier lifts that kills the
    imaginary parts of their pairwise form values.  The three lifts then
    span a real subspace on which the form is real-valued, so the triple
    product is real by construction.  Attempts whose adjusted lifts
    leave the negative cone are resampled.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        u = random_point(n, r_max, rng).lift
        x = _realify_against(random_point(n, r_max, rng).lift, [u])
        if classify(x) is not PointClass.NEGATIVE:
            continue
        y = _realify_against(random_point(n, r_max, rng).lift, [u, x])
        if classify(y) is not PointClass.NEGATIVE:
            continue
        pts = (normalize_lift(u), normalize_lift(x), normalize_lift(y))
        if pts[0].approx_eq(pts[1], 1e-6) or pts[0].approx_eq(pts[2], 1e-6) \
                or pts[1].approx_eq(pts[2], 1e-6):
            continue
        return pts
    raise GeometryError("failed to sample a totally real triple")


def make_totally_real_tuple(n: int, m: int, rng=None, seed=None,
                            r_max: float = 0.7, max_attempts: int = 500):
    """m random interior points inside one (maximal) totally real subspace.

    Takes real linear combinations of a mutually-real basis of n+1
    lifts; real combinations stay inside the real span, so every
    pairwise form value of the output is real.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    basis = None
    for _ in range(max_attempts):
        cand = [random_point(n, r_max, rng).lift]
        ok = True
        for _ in range(n):
            v = _realify_against(random_point(n, r_max, rng).lift, cand)
            if math.sqrt(v.euclid_norm2()) < 1e-8:
                ok = False
                break
            cand.append(v)
        if ok:
            basis = cand
            break
    if basis is None:
        raise GeometryError("failed to build a totally real basis")
    points = []
    for _ in range(max_attempts):
        if len(points) == m:
            break
        coeffs = rng.uniform(-1.0, 1.0, size=len(basis))
        vec = basis[0].right_scaled(Quaternion(coeffs[0]))
        for c, b in zip(coeffs[1:], basis[1:]):
            vec = vec + b.right_scaled(Quaternion(c))
        if math.sqrt(vec.euclid_norm2()) < 1e-8:
            continue
        if classify(vec) is not PointClass.NEGATIVE:
            continue
        p = normalize_lift(vec)
        if any(p.approx_eq(q, 1e-6) for q in points):
            continue
        points.append(p)
    if len(points) != m:
        raise GeometryError("failed to sample enough totally real points")
    return tuple(points)


# -- point file format ----------------------------------------------------

def save_points(path, points, n=None):
    """Write points as {"n": ..., "points": [[ [w,x,y,z] x (n+1) ], ...]}."""
    pts = list(points)
    if n is None:
        if not pts:
            raise DegenerateInputError("cannot infer n from an empty point list")
        n = pts[0].n
    doc = {"n": n, "points": [p.lift.to_arrays() for p in pts]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_points(path):
    """Read a point file; returns (n, list of ProjPoint)."""
    with open(path) as fh:
        doc = json.load(fh)
    n = int(doc["n"])
    points = []
    for arrays in doc["points"]:
        if len(arrays) != n + 1:
            raise DimensionMismatchError(
                f"point with {len(arrays)} entries in a file with n={n}")
        points.append(normalize_lift(HVector.from_arrays(arrays)))
    return n, points
