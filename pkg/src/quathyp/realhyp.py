"""Real hyperbolic backend: Klein-model volumes and distance-geometry embedding.

Points on a quaternionic line (or a complex line, for the plane suite)
are placed into the Klein ball model of constant-curvature -1 hyperbolic
space by factoring the matrix of -cosh(pairwise distances): that matrix
is, exactly when the distances are hyperbolic, the Minkowski Gram matrix
of hyperboloid vectors, so its eigendecomposition reconstructs
coordinates directly.  The Klein model is used as the integration domain
because geodesic simplices there are Euclidean simplices; the metric
enters only through the volume density (1 - |x|^2)^(-(dim+1)/2).

Signed simplex volumes are computed by a fixed-order interior simplex
rule pair (degrees 5 and 7, nodes from the odd-numerator barycentric
family, weights solved from moment exactness and verified on monomials
in the test suite) driven by adaptive longest-edge bisection.  Ideal
configurations are never integrated directly; a family of truncations
r_k = 1 - 2^-k is extrapolated to the boundary instead.  An independent
Monte Carlo rejection oracle cross-checks the quadrature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .hermitian import GeometryError
from .lines import dist

__all__ = [
    "CalibrationError",
    "QuadratureError",
    "ExtrapolationError",
    "SingularInputError",
    "QuadratureConfig",
    "SignedSimplex",
    "embed_from_gram",
    "gram_embed",
    "klein_density",
    "simplex_volume",
    "simplex_orientation",
    "regular_simplex",
    "extrapolate_ideal",
    "v4_const",
    "triangle_area_h2",
    "triangle_angle_defect",
    "klein_distance",
    "monte_carlo_volume",
    "random_lorentz",
    "apply_isometry_klein",
]


class CalibrationError(GeometryError):
    """The distance data does not fit the target constant-curvature space."""


class QuadratureError(GeometryError):
    """Adaptive quadrature ran out of budget; carries the best estimate."""

    def __init__(self, message, value, err_est):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class ExtrapolationError(GeometryError):
    pass


class SingularInputError(GeometryError):
    pass


@dataclass
class QuadratureConfig:
    """Adaptive quadrature settings; also the shape of the global config file."""

    tol: float = 1e-6
    max_cells: int = 2_000_000
    ideal_schedule: tuple = tuple(range(4, 13))

    @classmethod
    def from_dict(cls, d: dict) -> "QuadratureConfig":
        cfg = cls()
        if "tol" in d:
            cfg.tol = float(d["tol"])
        if "max_cells" in d:
            cfg.max_cells = int(d["max_cells"])
        if "ideal_schedule" in d:
            cfg.ideal_schedule = tuple(int(k) for k in d["ideal_schedule"])
        return cfg

    def to_dict(self) -> dict:
        return {"tol": self.tol, "max_cells": self.max_cells,
                "ideal_schedule": list(self.ideal_schedule)}


def v4_const() -> float:
    """Volume of the maximal (ideal regular) 4-simplex in curvature -1."""
    return (10.0 * math.pi / 3.0) * math.asin(1.0 / 3.0) - math.pi ** 2 / 3.0


# -- densities -------------------------------------------------------------

def klein_density(x, dim: int = 4):
    """Hyperbolic volume density (1 - |x|^2)^(-(dim+1)/2) at Klein coordinates x."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        s = 1.0 - float(x @ x)
        if s <= 0.0:
            raise SingularInputError("density requested at or outside the boundary")
        return s ** (-(dim + 1) / 2.0)
    s = 1.0 - np.einsum("ij,ij->i", x, x)
    if np.any(s <= 0.0):
        raise SingularInputError("density requested at or outside the boundary")
    return s ** (-(dim + 1) / 2.0)


# -- interior simplex rules -------------------------------------------------

class _SimplexRule:
    """Fully interior symmetric rule on the standard d-simplex.

    Nodes are the classic odd-numerator barycentric points
    (2*beta + 1) / (d + 2s + 1 - 2i) over multi-indices |beta| = s - i;
    the s+1 class weights are solved from exactness on all monomials of
    total degree <= 2s+1 (the moment system is consistent by
    construction, and the solve is checked at import time).
    """

    def __init__(self, dim: int, s: int):
        self.dim = dim
        self.degree = 2 * s + 1
        nodes = []
        class_of = []
        for i in range(s + 1):
            denom = dim + 2 * s + 1 - 2 * i
            for beta in _compositions(s - i, dim + 1):
                nodes.append([(2 * b + 1) / denom for b in beta])
                class_of.append(i)
        bary = np.array(nodes)                    # (N, dim+1)
        self.bary = bary
        self.cart = bary[:, 1:]                   # cartesian on the standard simplex
        # moment matrix over monomials of degree <= 2s+1
        monos = [a for deg in range(2 * s + 2)
                 for a in _compositions(deg, dim)]
        A = np.zeros((len(monos), s + 1))
        b = np.zeros(len(monos))
        for r, alpha in enumerate(monos):
            vals = np.prod(self.cart ** np.array(alpha), axis=1)
            for c in range(s + 1):
                A[r, c] = vals[np.array(class_of) == c].sum()
            b[r] = _simplex_moment(alpha, dim)
        w_class, residual, _, _ = np.linalg.lstsq(A, b, rcond=None)
        check = np.abs(A @ w_class - b).max()
        if check > 1e-12:
            raise RuntimeError(f"simplex rule weight solve inconsistent: {check}")
        self.weights = w_class[np.array(class_of)]  # per node; sums to 1/d!


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _simplex_moment(alpha, dim: int) -> float:
    """Exact integral of prod x_i^alpha_i over the standard d-simplex."""
    num = 1.0
    for a in alpha:
        num *= math.factorial(a)
    return num / math.factorial(dim + sum(alpha))


_RULES: dict = {}


def _rule_pair(dim: int):
    """Cached (low, high) rule pair with stacked nodes for one evaluation pass."""
    if dim not in _RULES:
        low = _SimplexRule(dim, 2)   # degree 5
        high = _SimplexRule(dim, 3)  # degree 7
        bary = np.vstack([low.bary, high.bary])
        w_low = np.concatenate([low.weights, np.zeros(len(high.weights))])
        w_high = np.concatenate([np.zeros(len(low.weights)), high.weights])
        _RULES[dim] = (bary, w_low, w_high)
    return _RULES[dim]


# -- adaptive signed simplex volume -----------------------------------------

@dataclass
class SignedSimplex:
    """An ordered geodesic simplex in the Klein ball.

    The orientation is the sign of det[v1-v0, ..., vd-v0]; zero exactly
    when the vertices are affinely degenerate.
    """

    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)

    @property
    def orientation(self) -> int:
        return simplex_orientation(self.vertices)


def simplex_orientation(vertices) -> int:
    vertices = np.asarray(vertices, dtype=float)
    edges = vertices[1:] - vertices[0]
    det = np.linalg.det(edges)
    scale = np.abs(edges).max()
    if scale == 0.0 or abs(det) <= 1e-13 * scale ** len(edges):
        return 0
    return 1 if det > 0 else -1


def _integrate_adaptive(vertices, integrand, tol, max_cells, atol=0.0):
    """Adaptive integral of `integrand` over the hull of `vertices`.

    Refinement proceeds in waves: every active cell whose error exceeds
    its share of the budget is split at its longest edge, and all new
    cells are evaluated in one vectorized pass.  Selection depends only
    on the cell data and contributions are finally summed in creation
    order, so the result is schedule-independent.  Returns
    (value, err, ncells).
    """
    dim = vertices.shape[1]
    bary, w_low, w_high = _rule_pair(dim)
    w_diff = w_high - w_low

    def eval_cells(verts_arr, dets):
        # verts_arr: (m, dim+1, dim); one integrand call for the whole wave
        pts = np.matmul(bary[None, :, :], verts_arr)
        f = integrand(pts.reshape(-1, dim)).reshape(len(dets), -1)
        return dets * (f @ w_high), np.abs(dets * (f @ w_diff))

    root = np.array(sorted(map(tuple, vertices)))   # canonical vertex order
    det0 = abs(np.linalg.det(root[1:] - root[0])) if dim > 0 else 0.0
    if det0 == 0.0:
        return 0.0, 0.0, 1
    verts = root[None, :, :].copy()
    dets = np.array([det0])
    ids = np.array([0])
    vals, errs = eval_cells(verts, dets)
    ncells = 1
    next_id = 1
    frozen_vals: list = []
    frozen_errs: list = []
    frozen_ids: list = []
    frozen_err_total = 0.0

    edge_i = np.array([i for i in range(dim + 1) for j in range(i + 1, dim + 1)])
    edge_j = np.array([j for i in range(dim + 1) for j in range(i + 1, dim + 1)])

    while True:
        total_v = float(vals.sum()) + math.fsum(frozen_vals)
        total_e = float(errs.sum()) + frozen_err_total
        target = max(tol * abs(total_v), atol)
        if total_e <= target:
            break
        if ncells >= max_cells:
            raise QuadratureError(
                f"no convergence within {max_cells} cells", total_v, total_e)
        active_target = max(target - frozen_err_total, 0.0)
        per_cell = active_target / max(2 * len(vals), 1)
        select = np.where(errs > per_cell)[0]
        if len(select) == 0:
            select = np.array([int(np.argmax(errs))])
        room = max((max_cells - ncells) // 1, 1)
        if len(select) > room:
            order = select[np.argsort(-errs[select], kind="stable")]
            select = np.sort(order[:room])

        keep = np.ones(len(vals), dtype=bool)
        keep[select] = False
        sel_verts = verts[select]                         # (s, dim+1, dim)
        diffs = sel_verts[:, edge_i, :] - sel_verts[:, edge_j, :]
        d2 = np.einsum("sed,sed->se", diffs, diffs)       # (s, n_edges)
        longest = np.argmax(d2, axis=1)                   # first max, fixed pair order
        splittable = d2[np.arange(len(select)), longest] > 1e-28
        if not splittable.all():
            for k in np.where(~splittable)[0]:
                idx = select[k]
                frozen_vals.append(float(vals[idx]))
                frozen_errs.append(float(errs[idx]))
                frozen_ids.append(int(ids[idx]))
                frozen_err_total += float(errs[idx])
            sel_verts = sel_verts[splittable]
            longest = longest[splittable]
            sel_dets = dets[select][splittable]
        else:
            sel_dets = dets[select]
        if len(sel_verts) == 0:
            total_v = float(vals[keep].sum()) + math.fsum(frozen_vals)
            total_e = float(errs[keep].sum()) + frozen_err_total
            if total_e > max(tol * abs(total_v), atol):
                raise QuadratureError(
                    "refinement exhausted at machine edge length",
                    total_v, total_e)
            verts, dets, ids, vals, errs = (verts[keep], dets[keep], ids[keep],
                                            vals[keep], errs[keep])
            continue
        s = len(sel_verts)
        li = edge_i[longest]
        lj = edge_j[longest]
        mid = 0.5 * (sel_verts[np.arange(s), li] + sel_verts[np.arange(s), lj])
        nv = np.repeat(sel_verts, 2, axis=0)
        nv[0::2][np.arange(s), li] = mid
        nv[1::2][np.arange(s), lj] = mid
        nd = np.repeat(sel_dets * 0.5, 2)
        new_ids = np.arange(next_id, next_id + 2 * s, dtype=ids.dtype)
        next_id += 2 * s
        cv, ce = eval_cells(nv, nd)
        verts = np.concatenate([verts[keep], nv])
        dets = np.concatenate([dets[keep], nd])
        ids = np.concatenate([ids[keep], new_ids])
        vals = np.concatenate([vals[keep], cv])
        errs = np.concatenate([errs[keep], ce])
        ncells += 2 * s

    order = np.argsort(np.concatenate([ids, np.array(frozen_ids, dtype=ids.dtype)])
                       if frozen_ids else ids, kind="stable")
    all_vals = np.concatenate([vals, np.array(frozen_vals)]) if frozen_vals else vals
    all_errs = np.concatenate([errs, np.array(frozen_errs)]) if frozen_errs else errs
    value = math.fsum(all_vals[order])
    err = math.fsum(all_errs[order])
    return value, err, ncells


def simplex_volume(simplex, cfg: QuadratureConfig | None = None,
                   dim: int | None = None):
    """Signed hyperbolic volume of a geodesic simplex in the Klein ball.

    Returns (value, err_est).  The sign is the orientation of the vertex
    order; the magnitude is integrated over the canonically-ordered hull,
    so transposing two vertices negates the value exactly.
    """
    cfg = cfg or QuadratureConfig()
    verts = simplex.vertices if isinstance(simplex, SignedSimplex) else \
        np.asarray(simplex, dtype=float)
    if dim is None:
        dim = verts.shape[1]
    if verts.shape != (dim + 1, dim):
        raise SingularInputError(
            f"expected {dim + 1} vertices of dimension {dim}, got {verts.shape}")
    radii = np.sqrt(np.einsum("ij,ij->i", verts, verts))
    if np.any(radii >= 1.0):
        raise SingularInputError(
            "ideal or exterior vertex; integrate a truncated family instead")
    sign = simplex_orientation(verts)
    if sign == 0:
        return 0.0, 0.0
    value, err, _ = _integrate_adaptive(
        verts, lambda p: klein_density(p, dim), cfg.tol, cfg.max_cells)
    return sign * value, err


def klein_distance(x, y) -> float:
    """Hyperbolic distance between two Klein-model points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    num = 1.0 - float(x @ y)
    den = math.sqrt((1.0 - float(x @ x)) * (1.0 - float(y @ y)))
    return math.acosh(max(num / den, 1.0))


# -- distance-geometry embedding --------------------------------------------

def embed_from_gram(M, target_dim: int = 4, tol: float = 1e-8):
    """Reconstruct Klein coordinates from a -cosh(distance) matrix.

    The matrix must have at most target_dim positive and exactly one
    negative eigenvalue, the rest vanishing to within tol relative to the
    largest magnitude; eigenvector signs are fixed deterministically
    (largest-magnitude entry positive, eigenvalues descending) so repeat
    runs give identical embeddings.  Returns (klein_coords, info dict).
    """
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    vals, vecs = np.linalg.eigh(M)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    for c in range(m):
        k = int(np.argmax(np.abs(vecs[:, c])))
        if vecs[k, c] < 0:
            vecs[:, c] = -vecs[:, c]
    scale = np.abs(vals).max()
    pos = np.where(vals > tol * scale)[0]
    neg = np.where(vals < -tol * scale)[0]
    if len(neg) != 1 or len(pos) > target_dim:
        raise CalibrationError(
            "distance matrix is not a curvature -1 configuration: "
            f"eigenvalues {vals.tolist()}")
    residual = 0.0
    keep = set(pos.tolist()) | set(neg.tolist())
    for idx in range(m):
        if idx not in keep:
            residual = max(residual, abs(vals[idx]) / scale)
    X = np.zeros((m, target_dim))
    for out_axis, idx in enumerate(pos):
        X[:, out_axis] = math.sqrt(vals[idx]) * vecs[:, idx]
    t = math.sqrt(-vals[neg[0]]) * vecs[:, neg[0]]
    if t.sum() < 0:
        t = -t
    if np.any(t <= 0):
        raise CalibrationError("time coordinates not single-signed; not one sheet")
    klein = X / t[:, None]
    info = {
        "eigenvalues": vals.tolist(),
        "n_positive": int(len(pos)),
        "n_negative": int(len(neg)),
        "residual": float(residual),
        "minkowski_defect": float(
            np.abs(np.einsum("ij,ij->i", X, X) - t ** 2 + 1.0).max()),
    }
    return klein, info


def gram_embed(points, target_dim: int = 4, tol: float = 1e-8):
    """Embed points of one line into the Klein model via their distances.

    Returns (klein_coords (m, target_dim), info).  Input distances are
    reproduced by the output within the reported residuals; that
    round-trip is the calibration test for the distance formula.
    """
    pts = list(points)
    m = len(pts)
    M = -np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            d = dist(pts[i], pts[j])
            if math.isinf(d):
                raise SingularInputError("boundary point in gram_embed")
            M[i, j] = M[j, i] = -math.cosh(d)
    klein, info = embed_from_gram(M, target_dim, tol)
    defect = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            want = math.acosh(-M[i, j])
            got = klein_distance(klein[i], klein[j])
            defect = max(defect, abs(want - got) / max(want, 1e-12))
    info["distance_defect"] = float(defect)
    return klein, info


# -- regular simplices and the ideal limit ----------------------------------

def regular_simplex(r: float, dim: int = 4) -> np.ndarray:
    """Vertices of a regular dim-simplex inscribed in the sphere of radius r.

    Centered at the origin, so it is regular in the hyperbolic sense by
    symmetry; r = 1 gives the ideal regular simplex.
    """
    if not 0 < r <= 1:
        raise SingularInputError("radius must lie in (0, 1]")
    m = dim + 1
    centered = np.eye(m) - np.full((m, m), 1.0 / m)
    seed = np.column_stack([np.ones(m), np.eye(m)[:, :dim]])
    q, _ = np.linalg.qr(seed)
    coords = centered @ q[:, 1:]
    coords /= np.linalg.norm(coords[0])
    if simplex_orientation(coords) < 0:
        coords[[0, 1]] = coords[[1, 0]]
    return r * coords


def extrapolate_ideal(family, schedule=None, noise_floor: float = 0.0):
    """Boundary limit of a truncated-volume family by repeated Aitken steps.

    `family` maps a radius r in (0, 1) to a volume (or a (volume, err)
    pair); it is sampled at r_k = 1 - 2^-k over the schedule.  The tail
    must decay one-signedly (geometric, up to noise); otherwise the
    extrapolation is refused.  Returns (limit, err_bound).
    """
    ks = list(schedule if schedule is not None else QuadratureConfig().ideal_schedule)
    if len(ks) < 3:
        raise ExtrapolationError("schedule too short to extrapolate")
    vals, qerr = [], 0.0
    for k in ks:
        out = family(1.0 - 2.0 ** (-k))
        if isinstance(out, tuple):
            vals.append(float(out[0]))
            qerr += abs(float(out[1]))
        else:
            vals.append(float(out))
    scale = max(abs(v) for v in vals) or 1.0
    floor = max(noise_floor, 10.0 * qerr, 1e-13 * scale)
    diffs = [b - a for a, b in zip(vals, vals[1:])]
    live = [d for d in diffs[-4:] if abs(d) > floor]
    if not live:
        return vals[-1], floor
    if any(d > 0 for d in live) and any(d < 0 for d in live):
        raise ExtrapolationError("non-monotone tail; family is not converging")

    seq = vals
    est = vals[-1]
    change = abs(diffs[-1])
    for _ in range(3):
        if len(seq) < 3:
            break
        new = []
        for i in range(len(seq) - 2):
            d1 = seq[i + 1] - seq[i]
            d2 = seq[i + 2] - seq[i + 1]
            den = d2 - d1
            if abs(den) <= 1e-15 * scale:
                new.append(seq[i + 2])
            else:
                new.append(seq[i + 2] - d2 * d2 / den)
        prev = est
        est = new[-1]
        change = abs(est - prev)
        seq = new
        if change <= floor:
            break
    return est, change + qerr + floor


# -- plane (dimension 2) machinery -------------------------------------------

def triangle_area_h2(vertices, cfg: QuadratureConfig | None = None):
    """Signed hyperbolic area of a Klein-disc triangle; returns (value, err)."""
    return simplex_volume(np.asarray(vertices, dtype=float), cfg, dim=2)


def triangle_angle_defect(vertices) -> float:
    """Unsigned triangle area from the angle defect pi - (a + b + c).

    Angles come from the hyperbolic law of cosines applied to the three
    pairwise Klein distances; this is the closed-form oracle against
    which the quadrature is checked.
    """
    v = np.asarray(vertices, dtype=float)
    sides = [klein_distance(v[(i + 1) % 3], v[(i + 2) % 3]) for i in range(3)]
    total = 0.0
    for i in range(3):
        a, b, c = sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]
        num = math.cosh(b) * math.cosh(c) - math.cosh(a)
        den = math.sinh(b) * math.sinh(c)
        if den == 0.0:
            return 0.0
        total += math.acos(min(1.0, max(-1.0, num / den)))
    return math.pi - total


# -- independent Monte Carlo oracle ------------------------------------------

def monte_carlo_volume(vertices, n_samples: int, rng=None, seed=None,
                       dim: int | None = None, batch: int = 1_000_000):
    """Unsigned volume by rejection sampling from the bounding box.

    Draws uniform points in the axis-aligned bounding box, keeps those
    inside the simplex (barycentric solve), and averages the density.
    Shares no code path with the quadrature.  Returns (value, std_error).
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    verts = np.asarray(vertices, dtype=float)
    if dim is None:
        dim = verts.shape[1]
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    box_vol = float(np.prod(hi - lo))
    edges = (verts[1:] - verts[0]).T          # (dim, dim)
    inv = np.linalg.inv(edges)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        pts = rng.uniform(lo, hi, size=(b, dim))
        lam = (pts - verts[0]) @ inv.T
        inside = (lam >= 0).all(axis=1) & (lam.sum(axis=1) <= 1.0)
        f = np.zeros(b)
        if inside.any():
            f[inside] = klein_density(pts[inside], dim)
        total += float(f.sum())
        total_sq += float((f * f).sum())
        done += b
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    value = box_vol * mean
    se = box_vol * math.sqrt(var / n_samples)
    return value, se


# -- hyperbolic isometries for invariance tests ------------------------------

def random_lorentz(rng, dim: int = 4, max_rapidity: float = 1.5) -> np.ndarray:
    """A random orientation- and sheet-preserving Lorentz matrix on R^(dim,1)."""
    a = rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    rot = np.eye(dim + 1)
    rot[:dim, :dim] = q
    phi = rng.uniform(0.0, max_rapidity)
    boost = np.eye(dim + 1)
    boost[0, 0] = boost[dim, dim] = math.cosh(phi)
    boost[0, dim] = boost[dim, 0] = math.sinh(phi)
    return boost @ rot


def apply_isometry_klein(L: np.ndarray, klein_pts) -> np.ndarray:
    """Apply a Lorentz matrix to Klein points via their hyperboloid lifts."""
    x = np.asarray(klein_pts, dtype=float)
    t = 1.0 / np.sqrt(1.0 - np.einsum("ij,ij->i", x, x))
    lifts = np.column_stack([x * t[:, None], t])
    moved = lifts @ L.T
    return moved[:, :-1] / moved[:, -1:]
