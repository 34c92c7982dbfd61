"""Vertex-listed compact convex sets, their minimal / maximal tensor
products in explicit coordinates, and the gap finder between the two.

Coordinates: an affine function on K in R^d is a coefficient vector
(a_1, ..., a_d, b) for x |-> a.x + b; the constant function's slot is the
last index.  A functional on pairs of affine functions is a
(d1+1) x (d2+1) matrix M with phi(f (x) g) = f^T M g.  Functionals are
flattened row-major when stored as polytope vertices.

The minimal tensor product is the convex hull of the rank-one matrices
[v;1][w;1]^T over vertex pairs; the maximal one is cut out by
nonnegativity against all pairs of extreme rays of the factors' positive
affine-function cones.  Extreme rays and vertex enumerations are computed
by the double description method.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .cones import Status, Verdict

LP_TOL = 1e-9
DD_TOL = 1e-10
MAX_RAY_AMBIENT_DIM = 4
MAX_RAY_VERTICES = 12


@dataclass(frozen=True)
class Polytope:
    """Compact convex set given by its (distinct) vertex list."""

    vertices: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or len(v) == 0:
            raise ValueError("vertex list must be a nonempty 2-d array")
        for i in range(len(v)):
            for j in range(i + 1, len(v)):
                if np.linalg.norm(v[i] - v[j]) < 1e-10:
                    raise ValueError(f"duplicate vertices at indices {i}, {j}")
        v = np.ascontiguousarray(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class RayCone:
    """Extreme rays of the cone of positive affine functions on a polytope,
    in coefficient coordinates (a, b) for x |-> a.x + b."""

    rays: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.rays.shape[1]


@dataclass(frozen=True)
class TensorFunctional:
    """Functional on A(K1) (x) A(K2), normalized to 1 on u1 (x) u2."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("functional must be a 2-d coefficient matrix")
        if abs(m[-1, -1] - 1.0) > 1e-12:
            raise ValueError(f"normalization entry is {m[-1, -1]!r}, expected 1")
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def flat(self) -> np.ndarray:
        return self.matrix.ravel()

    def slice_left(self) -> np.ndarray:
        """Point of K1 recovered by pairing with the constant function on K2."""
        col = self.matrix[:, -1]
        return col[:-1] / col[-1]

    def slice_right(self) -> np.ndarray:
        row = self.matrix[-1, :]
        return row[:-1] / row[-1]


# ---------------------------------------------------------------------------
# elementary constructions


def simplex(n: int) -> Polytope:
    """Standard n-simplex: n+1 unit-coordinate vertices in R^{n+1}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return Polytope(np.eye(n + 1))


def square() -> Polytope:
    """The unit square in R^2, the canonical non-simplex."""
    return Polytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))


def affine_dimension(points) -> int:
    """Rank of the difference set; singular values below 1e-9 * max count as zero."""
    if isinstance(points, Polytope):
        points = points.vertices
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or len(p) == 0:
        raise ValueError("need a nonempty point list")
    if len(p) == 1:
        return 0
    diffs = p[1:] - p[0]
    s = np.linalg.svd(diffs, compute_uv=False)
    if len(s) == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > 1e-9 * s[0]))


def product_functional(v: np.ndarray, w: np.ndarray) -> TensorFunctional:
    """Rank-one functional [v;1][w;1]^T: the elementary tensor of two points."""
    return TensorFunctional(np.outer(np.append(v, 1.0), np.append(w, 1.0)))


def min_tensor(k1: Polytope, k2: Polytope) -> Polytope:
    """Minimal tensor product: vertices are elementary tensors of vertex pairs,
    flattened row-major, deduplicated."""
    rows = []
    for v in k1.vertices:
        for w in k2.vertices:
            rows.append(product_functional(v, w).flat)
    out: list[np.ndarray] = []
    for r in rows:
        if not any(np.linalg.norm(r - s) < 1e-10 for s in out):
            out.append(r)
    return Polytope(np.array(out))


def functional_shape(k1: Polytope, k2: Polytope) -> tuple[int, int]:
    return (k1.ambient_dim + 1, k2.ambient_dim + 1)


def functional_from_flat(flat: np.ndarray, k1: Polytope, k2: Polytope) -> TensorFunctional:
    return TensorFunctional(np.asarray(flat, dtype=float).reshape(functional_shape(k1, k2)))


# ---------------------------------------------------------------------------
# double description


def double_description(a: np.ndarray, tol: float = DD_TOL) -> np.ndarray:
    """Extreme rays of the pointed polyhedral cone {y : A y >= 0}.

    Standard incremental algorithm: start from a simplicial cone cut out by
    d independent inequalities, insert the remaining inequalities one at a
    time, combining adjacent (positive, negative) ray pairs.  Adjacency is
    the algebraic test: the inequalities tight at both rays have rank d-2.
    Rows and rays are kept unit-normalized so the tolerance is scale-free.
    """
    a = np.asarray(a, dtype=float)
    k, d = a.shape
    norms = np.linalg.norm(a, axis=1)
    if np.any(norms < tol):
        raise ValueError("zero inequality row")
    a = a / norms[:, None]
    if np.linalg.matrix_rank(a, tol=1e-9) < d:
        raise ValueError("cone is not pointed: inequality normals do not span")

    chosen: list[int] = []
    for i in range(k):
        if np.linalg.matrix_rank(a[chosen + [i]], tol=1e-9) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == d:
            break
    rays_mat = np.linalg.inv(a[chosen])
    rays = [rays_mat[:, j] / np.linalg.norm(rays_mat[:, j]) for j in range(d)]
    inserted = list(chosen)

    for i in (j for j in range(k) if j not in chosen):
        row = a[i]
        vals = np.array([row @ r for r in rays])
        pos = [j for j in range(len(rays)) if vals[j] > tol]
        neg = [j for j in range(len(rays)) if vals[j] < -tol]
        zer = [j for j in range(len(rays)) if abs(vals[j]) <= tol]
        if not neg:
            inserted.append(i)
            continue
        asub = a[inserted]
        tight = [np.abs(asub @ rays[j]) <= tol for j in range(len(rays))]
        new_rays = []
        for p, q in itertools.product(pos, neg):
            common = tight[p] & tight[q]
            if common.sum() < d - 2:
                continue
            if np.linalg.matrix_rank(asub[common], tol=1e-9) == d - 2:
                r = vals[p] * rays[q] - vals[q] * rays[p]
                new_rays.append(r / np.linalg.norm(r))
        rays = [rays[j] for j in pos + zer] + new_rays
        inserted.append(i)

    unique: list[np.ndarray] = []
    for r in rays:
        if not any(np.linalg.norm(r - s) < 1e-8 for s in unique):
            unique.append(r)
    order = np.lexsort(np.round(np.array(unique), 9).T[::-1])
    return np.array(unique)[order]


def _affine_chart(k: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Anchor point and orthonormal direction basis (d, q) of aff(K)."""
    v0 = k.vertices[0]
    centered = k.vertices - v0
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if len(s) == 0 or s[0] == 0.0:
        return v0, np.zeros((k.ambient_dim, 0))
    q = int(np.sum(s > 1e-9 * s[0]))
    return v0, vt[:q].T


def positive_ray_generators(k: Polytope) -> RayCone:
    """Extreme rays of {(a, b) : a.v + b >= 0 for all vertices v}.

    Lower-dimensional polytopes are handled in an affine chart, where the
    cone of positive affine functions is pointed; the returned coefficient
    vectors are representatives pulled back to the ambient coordinates,
    normalized to max-abs coefficient 1.  Limited to the double-description
    scale stated in the module constants.
    """
    if k.ambient_dim > MAX_RAY_AMBIENT_DIM:
        raise ValueError(
            f"ambient dimension {k.ambient_dim} exceeds the supported {MAX_RAY_AMBIENT_DIM}"
        )
    if k.n_vertices > MAX_RAY_VERTICES:
        raise ValueError(
            f"vertex count {k.n_vertices} exceeds the supported {MAX_RAY_VERTICES}"
        )
    v0, basis = _affine_chart(k)
    reduced = (k.vertices - v0) @ basis  # (k, q)
    b = np.hstack([reduced, np.ones((k.n_vertices, 1))])
    rays_reduced = double_description(b)
    out = []
    for y in rays_reduced:
        c, c0 = y[:-1], y[-1]
        a = basis @ c
        offset = c0 - a @ v0
        full = np.append(a, offset)
        full = full / np.max(np.abs(full))
        out.append(full)
    order = np.lexsort(np.round(np.array(out), 9).T[::-1])
    return RayCone(np.array(out)[order])


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class RayPairCertificate:
    """Value of the functional on one pair of extreme rays."""

    ray_left: np.ndarray
    ray_right: np.ndarray
    value: float


@dataclass(frozen=True)
class ConvexWeightsCertificate:
    """Convex combination of minimal-tensor vertices reproducing the input."""

    weights: np.ndarray
    residual: float


@dataclass(frozen=True)
class SeparatingHyperplane:
    """Affine functional h with h(input) > offset >= h(v) on all min vertices."""

    normal: np.ndarray
    offset: float
    margin: float


def max_tensor_membership(
    phi: TensorFunctional, k1: Polytope, k2: Polytope, tol: float = LP_TOL
) -> Verdict:
    """In iff r^T M s >= -tol for every pair of extreme rays (r, s)."""
    r1 = positive_ray_generators(k1).rays
    r2 = positive_ray_generators(k2).rays
    vals = r1 @ phi.matrix @ r2.T
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    cert = RayPairCertificate(r1[i], r2[j], float(vals[i, j]))
    status = Status.IN if vals[i, j] >= -tol else Status.OUT
    return Verdict(status, cert)


def _min_distance_lp(flat_phi: np.ndarray, vertices: np.ndarray):
    """Inf-norm distance from a functional to the convex hull of the given
    vertices: min t s.t. |sum_p lam_p V_p - phi| <= t, lam in the simplex."""
    p, dim = vertices.shape
    c = np.zeros(p + 1)
    c[-1] = 1.0
    a_ub = np.vstack(
        [
            np.hstack([vertices.T, -np.ones((dim, 1))]),
            np.hstack([-vertices.T, -np.ones((dim, 1))]),
        ]
    )
    b_ub = np.concatenate([flat_phi, -flat_phi])
    a_eq = np.ones((1, p + 1))
    a_eq[0, -1] = 0.0
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
        bounds=[(0, None)] * (p + 1), method="highs",
    )
    if not res.success:
        raise RuntimeError(f"membership LP failed: {res.message}")
    return float(res.fun), np.asarray(res.x[:p])


def _separating_hyperplane(flat_phi: np.ndarray, vertices: np.ndarray) -> SeparatingHyperplane:
    """Maximize y.phi - mu over ||y||_1 <= 1, y.V_p <= mu: the LP dual of
    the distance problem, solved directly so the certificate needs no
    marginal bookkeeping."""
    p, dim = vertices.shape
    # variables: y+ (dim), y- (dim), mu (free)
    c = np.concatenate([-flat_phi, flat_phi, [1.0]])  # minimize -(y.phi - mu)
    a_ub = np.vstack(
        [
            np.hstack([vertices, -vertices, -np.ones((p, 1))]),
            np.concatenate([np.ones(2 * dim), [0.0]])[None, :],
        ]
    )
    b_ub = np.concatenate([np.zeros(p), [1.0]])
    bounds = [(0, None)] * (2 * dim) + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"separating-hyperplane LP failed: {res.message}")
    y = res.x[:dim] - res.x[dim : 2 * dim]
    offset = float(np.max(vertices @ y))
    margin = float(y @ flat_phi - offset)
    return SeparatingHyperplane(y, offset, margin)


def min_tensor_membership(
    phi: TensorFunctional, k1: Polytope, k2: Polytope, tol: float = LP_TOL
) -> Verdict:
    """LP test for membership in the convex hull of elementary tensors.

    In with the convex weights when the inf-norm distance is <= tol; Out
    with a separating hyperplane (from LP duality) otherwise.
    """
    mv = min_tensor(k1, k2).vertices
    dist, weights = _min_distance_lp(phi.flat, mv)
    if dist <= tol:
        return Verdict(Status.IN, ConvexWeightsCertificate(weights, dist))
    return Verdict(Status.OUT, _separating_hyperplane(phi.flat, mv))


# ---------------------------------------------------------------------------
# maximal tensor polytope and the gap finder


def max_tensor_polytope(k1: Polytope, k2: Polytope) -> Polytope:
    """Vertex enumeration of the maximal tensor product.

    The maximal set lives in the affine hull of the minimal one (the two
    have equal dimension), so it is parameterized there and cut out by the
    ray-pair inequalities; the homogenized cone is enumerated by double
    description.  Vertices are returned as flattened functionals.
    """
    r1 = positive_ray_generators(k1).rays
    r2 = positive_ray_generators(k2).rays
    mv = min_tensor(k1, k2).vertices
    m0 = mv.mean(axis=0)
    centered = mv - m0
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * s[0])) if len(s) and s[0] > 0 else 0
    q = vt[:rank]  # rows orthonormal, (D, dim)

    rows, offs = [], []
    for r in r1:
        for t in r2:
            prod = np.outer(r, t).ravel()
            rows.append(q @ prod)
            offs.append(prod @ m0)
    g = np.array(rows)
    h = np.array(offs)
    hom = np.hstack([g, h[:, None]])
    hom = np.vstack([hom, np.append(np.zeros(rank), 1.0)])
    rays = double_description(hom)

    verts = []
    for ray in rays:
        t = ray[-1]
        if t <= 1e-9:
            raise RuntimeError("maximal tensor polytope appears unbounded")
        verts.append(m0 + q.T @ (ray[:-1] / t))
    verts = np.array(verts)
    order = np.lexsort(np.round(verts, 9).T[::-1])
    return Polytope(verts[order])


@dataclass(frozen=True)
class BarkerGap:
    """A functional inside the maximal but outside the minimal tensor product."""

    functional: TensorFunctional
    max_verdict: Verdict
    min_verdict: Verdict

    @property
    def margin(self) -> float:
        return self.min_verdict.certificate.margin


def barker_gap(k1: Polytope, k2: Polytope, tol: float = LP_TOL) -> BarkerGap | None:
    """Search for a point separating the two tensor products.

    The LP distance to the minimal polytope is convex, so its maximum over
    the maximal polytope is attained at a vertex: enumerate the maximal
    polytope's vertices, take the one of maximal distance, and return it
    with both certificates, or None when every vertex lies in the minimal
    polytope (which proves the two sets are equal).
    """
    mv = min_tensor(k1, k2).vertices
    best_flat, best_dist = None, tol
    for flat in max_tensor_polytope(k1, k2).vertices:
        dist, _ = _min_distance_lp(flat, mv)
        if dist > best_dist:
            best_flat, best_dist = flat, dist
    if best_flat is None:
        return None
    phi = functional_from_flat(best_flat, k1, k2)
    max_v = max_tensor_membership(phi, k1, k2, tol)
    min_v = min_tensor_membership(phi, k1, k2, tol)
    return BarkerGap(phi, max_v, min_v)


# ---------------------------------------------------------------------------
# relative boundedness


def _aff_contained(outer: np.ndarray, inner: np.ndarray, tol: float = 1e-9) -> bool:
    v0 = inner[0]
    centered = inner - v0
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * s[0])) if len(s) and s[0] > 0 else 0
    basis = vt[:rank]
    scale = max(1.0, float(np.max(np.abs(outer))))
    for z in outer:
        d = z - v0
        resid = d - basis.T @ (basis @ d)
        if np.linalg.norm(resid) > tol * scale:
            return False
    return True


def relative_bound(inner: Polytope, outer: Polytope) -> float:
    """Smallest r >= 0 with outer contained in {(r+1)x - ry : x, y in inner}.

    Computed per outer vertex by LP: z = (r+1)x - ry with x, y convex
    combinations of inner vertices becomes z = V^T(a - b), 1^T(a - b) = 1,
    a, b >= 0, minimizing r = 1^T b; the bound is the maximum over
    vertices.  Errors when the affine hulls differ.
    """
    if not _aff_contained(outer.vertices, inner.vertices):
        raise ValueError("affine hull of outer is not contained in that of inner")
    iv = inner.vertices
    p = len(iv)
    c = np.concatenate([np.zeros(p), np.ones(p)])
    best = 0.0
    for z in outer.vertices:
        a_eq = np.vstack(
            [
                np.hstack([iv.T, -iv.T]),
                np.concatenate([np.ones(p), -np.ones(p)])[None, :],
            ]
        )
        b_eq = np.concatenate([z, [1.0]])
        res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * (2 * p), method="highs")
        if not res.success:
            raise RuntimeError(f"relative-bound LP failed: {res.message}")
        best = max(best, float(res.fun))
    return best
