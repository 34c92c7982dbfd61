"""Max-norms of bipartite functionals and the min{n, m} closed form.

The key quantity is the largest max-norm attained on the outer (dual)
tensor cone's unit functionals; for matrix factors it equals min{n, m},
with the lower bound witnessed by the normalized swap operator and by the
completely bounded norm of the transpose map.  Estimation here is
lower-bound-only: certificates are explicit Hermitian contractions, while
the matching upper bound is the closed form itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .cones import OptimizerConfig, Verdict, is_block_positive
from .maps import MatrixMap, adjoint_map
from .operators import BipartiteOperator, bipartite, trace_norm
from .polytopes import Polytope, TensorFunctional, min_tensor


def max_norm_of_functional(t: BipartiteOperator) -> float:
    """Norm of the functional <., T>: the trace norm of T in finite dimension."""
    return trace_norm(t)


def kappa_exact(n: int, m: int) -> float:
    """Closed form min{n, m}; equals 1 exactly when one factor is commutative."""
    if n < 1 or m < 1:
        raise ValueError("dimensions must be positive")
    return float(min(n, m))


def embedded_swap(n: int, m: int) -> BipartiteOperator:
    """Swap of the first k = min{n, m} coordinates of each factor, embedded
    in M_n (x) M_m.  Hermitian with operator norm 1."""
    k = min(n, m)
    s = np.zeros((n * m, n * m))
    for i in range(k):
        for j in range(k):
            s[i * m + j, j * m + i] = 1.0
    return bipartite(s, n, m)


@dataclass(frozen=True)
class KappaWitness:
    functional: BipartiteOperator
    value: float
    block_positive: Verdict


def kappa_witness(n: int, cfg: OptimizerConfig | None = None) -> KappaWitness:
    """The unit functional S/n on M_n (x) M_n, with trace norm exactly n.

    Block-positivity of the witness is certified by the optimizer and
    attached to the result.
    """
    t = embedded_swap(n, n)
    w = bipartite(t.matrix / n, n, n)
    return KappaWitness(w, trace_norm(w), is_block_positive(w, cfg=cfg))


@dataclass(frozen=True)
class CbConfig:
    starts: int = 100
    steps: int = 300
    seed: int = 0


@dataclass(frozen=True)
class CbEstimate:
    value: float
    argmax: BipartiteOperator
    starts: int
    steps: int
    seed: int


def _sign_project(x: np.ndarray) -> np.ndarray:
    """Nearest Hermitian symmetry: replace eigenvalues by their signs."""
    w, u = np.linalg.eigh(x)
    signs = np.where(w >= 0, 1.0, -1.0)
    if x.ndim == 3:
        return np.einsum("bik,bk,bjk->bij", u, signs, u.conj())
    return (u * signs) @ u.conj().T


def cb_norm_estimate(phi: MatrixMap, cfg: CbConfig | None = None) -> CbEstimate:
    """Lower bound on ||Phi (x) id_m|| by ascent over Hermitian symmetries.

    The norm of Phi (x) id_m is attained at self-adjoint contractions, and
    the extreme points of the Hermitian unit ball are the symmetries
    U diag(+-1) U*.  Starting from deterministic candidates (identity,
    embedded swap) and seeded random symmetries, ascend by stepping along
    the supergradient of X |-> ||(Phi (x) id)(X)|| and re-projecting onto
    the symmetries.  Returns the best value found and the maximizing X.
    """
    cfg = cfg or CbConfig()
    n, m = phi.input_dim, phi.output_dim
    dim = n * m
    l4 = phi.unit_images()
    l4adj = adjoint_map(phi).unit_images()
    rng = np.random.default_rng(cfg.seed)

    def apply_batch(xb: np.ndarray) -> np.ndarray:
        x4 = xb.reshape(-1, n, m, n, m)
        y = np.einsum("pqij,bikjl->bpkql", l4, x4)
        return y.reshape(len(xb), m * m, m * m)

    def objective(xb: np.ndarray):
        y = apply_batch(xb)
        w, v = np.linalg.eigh(y)
        pick_hi = np.abs(w[:, -1]) >= np.abs(w[:, 0])
        vals = np.where(pick_hi, np.abs(w[:, -1]), np.abs(w[:, 0]))
        idx = np.where(pick_hi, w.shape[1] - 1, 0)
        vecs = v[np.arange(len(xb)), :, idx]
        signs = np.where(
            np.take_along_axis(w, idx[:, None], axis=1)[:, 0] >= 0, 1.0, -1.0
        )
        return vals, vecs, signs

    det = [np.eye(dim, dtype=complex), embedded_swap(n, m).matrix.astype(complex)]
    det_vals, _, _ = objective(np.array(det))

    x = np.empty((cfg.starts, dim, dim), dtype=complex)
    n_det = min(len(det), cfg.starts)
    for i in range(n_det):
        x[i] = _sign_project(det[i])
    for i in range(n_det, cfg.starts):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        _, u = np.linalg.eigh((g + g.conj().T) / 2)
        signs = rng.choice([-1.0, 1.0], size=dim)
        x[i] = (u * signs) @ u.conj().T

    f, vecs, signs = objective(x)
    step = np.full(cfg.starts, 0.3)
    best_f = f.copy()
    best_x = x.copy()
    for _ in range(cfg.steps):
        proj = np.einsum("bi,bj->bij", vecs, vecs.conj())
        p4 = proj.reshape(-1, m, m, m, m)
        grad = np.einsum("pqij,bikjl->bpkql", l4adj, p4).reshape(-1, dim, dim)
        grad *= signs[:, None, None]
        moved = False
        for _ in range(4):
            cand = _sign_project(x + step[:, None, None] * grad)
            fc, vc, sc = objective(cand)
            ok = fc > f + 1e-12
            if ok.any():
                x[ok], f[ok], vecs[ok], signs[ok] = cand[ok], fc[ok], vc[ok], sc[ok]
                step[ok] *= 1.2
                moved = True
            step[~ok] *= 0.5
            if ok.all():
                break
        better = f > best_f
        best_f[better] = f[better]
        best_x[better] = x[better]
        if not moved and step.max() < 1e-10:
            break

    all_vals = np.concatenate([det_vals, best_f])
    best = int(np.argmax(all_vals))
    arg = det[best] if best < len(det) else best_x[best - len(det)]
    return CbEstimate(
        value=float(all_vals[best]),
        argmax=bipartite(arg, n, m),
        starts=cfg.starts,
        steps=cfg.steps,
        seed=cfg.seed,
    )


def extremal_positive_map(n: int, m: int) -> MatrixMap:
    """Unital positive map M_n -> M_m whose cb norm attains min{n, m}:
    transpose on the leading min{n, m} corner, padded unitaly."""
    k = min(n, m)

    def action(a: np.ndarray) -> np.ndarray:
        out = np.zeros((m, m), dtype=complex)
        out[:k, :k] = a[:k, :k].T
        for i in range(k, m):
            out[i, i] = a[0, 0]
        return out

    return MatrixMap.from_function(n, m, action)


@dataclass(frozen=True)
class KappaReport:
    n: int
    m: int
    exact: float
    witness_lower_bound: float
    cb_estimate: float
    witness: BipartiteOperator


def kappa_report(
    n: int,
    m: int,
    cb_map: MatrixMap | None = None,
    cb_cfg: CbConfig | None = None,
    witness_cfg: OptimizerConfig | None = None,
) -> KappaReport:
    """Bundle the closed form with both computed lower bounds."""
    k = min(n, m)
    t = embedded_swap(n, m)
    witness = bipartite(t.matrix / k, n, m)
    phi = cb_map if cb_map is not None else extremal_positive_map(n, m)
    est = cb_norm_estimate(phi, cb_cfg)
    return KappaReport(
        n=n,
        m=m,
        exact=kappa_exact(n, m),
        witness_lower_bound=max_norm_of_functional(witness),
        cb_estimate=est.value,
        witness=witness,
    )


def polytope_max_norm(phi: TensorFunctional, k1: Polytope, k2: Polytope) -> float:
    """Norm of a tensor functional against the unit ball of functions
    bounded by 1 on the minimal tensor polytope.

    Functionals of the form (r+1) x - r y with x, y in the minimal polytope
    have norm at most 2r + 1 in this pairing, which links the relative
    bound of the polytope pair to the max-norm picture.
    """
    mv = min_tensor(k1, k2).vertices
    _, s, vt = np.linalg.svd(mv, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * s[0]))
    q = vt[:rank]
    obj = q @ phi.flat
    constr = mv @ q.T
    a_ub = np.vstack([constr, -constr])
    b_ub = np.ones(2 * len(mv))
    res = linprog(-obj, A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * rank, method="highs")
    if not res.success:
        raise RuntimeError(f"max-norm LP failed: {res.message}")
    return float(-res.fun)
