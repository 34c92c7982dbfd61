"""Linear-map calculus on matrix algebras: Choi / Jamiolkowski transforms,
positivity certification, and the state <-> positive-map correspondence.

A map Phi: M_a -> M_b is stored as a real (b^2) x (a^2) coefficient array
over the orthonormal Hermitian basis of each algebra: the diagonal matrix
units E_ii first, then (E_ij + E_ji)/sqrt(2) for i < j in lexicographic
order, then i(E_ij - E_ji)/sqrt(2).  A real coefficient array is exactly
the condition that Hermitian inputs go to Hermitian outputs; the action on
non-Hermitian matrices is the canonical complex-linear extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cones import OptimizerConfig, Status, Verdict, is_block_positive
from .operators import (
    BipartiteOperator,
    HermitianOperator,
    bipartite,
    h_operator,
    hilbert_schmidt,
    swap_operator,
)


@lru_cache(maxsize=32)
def hermitian_basis(n: int) -> np.ndarray:
    """Orthonormal Hermitian basis of M_n, shape (n^2, n, n)."""
    mats = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        mats.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2)
            mats.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1j / np.sqrt(2)
            e[j, i] = -1j / np.sqrt(2)
            mats.append(e)
    out = np.array(mats)
    out.setflags(write=False)
    return out


def basis_coefficients(m: np.ndarray) -> np.ndarray:
    """Coefficients of a matrix in the Hermitian basis (complex in general)."""
    b = hermitian_basis(m.shape[0])
    return np.einsum("kpq,qp->k", b, m)


def matrix_from_coefficients(c: np.ndarray, n: int) -> np.ndarray:
    return np.einsum("k,kpq->pq", c, hermitian_basis(n))


@dataclass(frozen=True)
class MatrixMap:
    """Real-linear map M_{input_dim} -> M_{output_dim} on Hermitian matrices."""

    input_dim: int
    output_dim: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        want = (self.output_dim ** 2, self.input_dim ** 2)
        if c.shape != want:
            raise ValueError(f"coefficient array must have shape {want}, got {c.shape}")
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_function(cls, input_dim: int, output_dim: int, fn) -> "MatrixMap":
        """Build the coefficient array by applying ``fn`` to the Hermitian basis."""
        cols = []
        for b in hermitian_basis(input_dim):
            out = np.asarray(fn(b), dtype=complex)
            cols.append(basis_coefficients(out).real)
        return cls(input_dim, output_dim, np.array(cols).T)

    @classmethod
    def identity(cls, n: int) -> "MatrixMap":
        return cls(n, n, np.eye(n * n))

    @classmethod
    def transpose(cls, n: int) -> "MatrixMap":
        return cls.from_function(n, n, lambda a: a.T)

    @classmethod
    def trace_state(cls, n: int, m: int) -> "MatrixMap":
        """A |-> Tr(A) I_m / m, the maximally mixed output map."""
        return cls.from_function(n, m, lambda a: np.trace(a) * np.eye(m) / m)

    @classmethod
    def reduction(cls, n: int) -> "MatrixMap":
        """A |-> Tr(A) I - A; positive but not completely positive for n >= 2."""
        return cls.from_function(n, n, lambda a: np.trace(a) * np.eye(n) - a)

    def apply(self, m: np.ndarray | HermitianOperator) -> np.ndarray:
        if isinstance(m, HermitianOperator):
            m = m.matrix
        c = basis_coefficients(np.asarray(m, dtype=complex))
        return matrix_from_coefficients(self.coeffs @ c, self.output_dim)

    def apply_hermitian(self, m: HermitianOperator) -> HermitianOperator:
        return HermitianOperator(self.apply(m.matrix))

    def unit_images(self) -> np.ndarray:
        """Tensor L[p, q, i, j] = Phi(E_ij)[p, q]; the complex-linear action."""
        a, b = self.input_dim, self.output_dim
        out = np.empty((b, b, a, a), dtype=complex)
        for i in range(a):
            for j in range(a):
                e = np.zeros((a, a), dtype=complex)
                e[i, j] = 1.0
                out[:, :, i, j] = self.apply(e)
        return out


def adjoint_map(psi: MatrixMap) -> MatrixMap:
    """Adjoint for the trace pairing: Tr(Psi(A) B) = Tr(A Psi*(B)).

    In the orthonormal Hermitian basis this is exactly the transposed
    coefficient array.
    """
    return MatrixMap(psi.output_dim, psi.input_dim, psi.coeffs.T.copy())


def apply_to_left_factor(phi: MatrixMap, x: BipartiteOperator) -> BipartiteOperator:
    """(Phi (x) id)(X) for X on C^{input_dim} (x) C^c."""
    if x.n != phi.input_dim:
        raise ValueError(f"left factor dim {x.n} != map input dim {phi.input_dim}")
    l4 = phi.unit_images()
    x4 = x.reshaped()
    y = np.einsum("pqij,ikjl->pkql", l4, x4)
    b, c = phi.output_dim, x.m
    return bipartite(y.reshape(b * c, b * c), b, c)


def choi(psi: MatrixMap) -> BipartiteOperator:
    """Choi matrix (Psi (x) id)(H) = sum_ij Psi(E_ij) (x) E_ij."""
    return apply_to_left_factor(psi, h_operator(psi.input_dim))


def jamiolkowski(psi: MatrixMap) -> BipartiteOperator:
    """Jamiolkowski matrix (Psi (x) id)(S) = sum_ij Psi(E_ij) (x) E_ji.

    Related to the Choi matrix by a right-factor partial transpose.
    """
    return apply_to_left_factor(psi, swap_operator(psi.input_dim))


def map_from_choi(c: BipartiteOperator) -> MatrixMap:
    """The unique map with the given Choi matrix (exact inverse of ``choi``)."""
    n, m = c.n, c.m
    c4 = c.reshaped()

    def action(a: np.ndarray) -> np.ndarray:
        # Psi(E_kl)[i, j] = C[(i,k), (j,l)]
        return np.einsum("ikjl,kl->ij", c4, a)

    return MatrixMap.from_function(m, n, action)


@dataclass(frozen=True)
class UnitalityReport:
    image_of_identity: HermitianOperator
    is_unital: bool
    normalized_trace_of_image: float


def unitality_report(phi: MatrixMap) -> UnitalityReport:
    img = HermitianOperator(phi.apply(np.eye(phi.input_dim, dtype=complex)))
    m = phi.output_dim
    dev = np.linalg.eigvalsh(img.matrix - np.eye(m))
    is_unital = bool(max(abs(dev[0]), abs(dev[-1])) < 1e-9)
    return UnitalityReport(img, is_unital, float(img.trace() / m))


def is_positive_map(
    psi: MatrixMap, tol: float = 1e-6, cfg: OptimizerConfig | None = None
) -> Verdict:
    """Positivity of the map, certified through block-positivity of its
    Jamiolkowski matrix."""
    return is_block_positive(jamiolkowski(psi), tol, cfg)


@dataclass(frozen=True)
class BipartiteFunctional:
    """Linear functional X |-> <X, density> on bipartite (n, m) operators."""

    density: BipartiteOperator

    def __call__(self, x: BipartiteOperator) -> float:
        if (x.n, x.m) != (self.density.n, self.density.m):
            raise ValueError("operator factorization does not match functional")
        return hilbert_schmidt(x.matrix, self.density.matrix)

    def value_on_identity(self) -> float:
        return float(self.density.op.trace())


_CHECK_CFG = OptimizerConfig(starts=60, steps=200, seed=0)


def _require_positive(phi: MatrixMap, cfg: OptimizerConfig | None) -> None:
    verdict = is_positive_map(phi, cfg=cfg or _CHECK_CFG)
    if verdict.status is not Status.IN:
        raise ValueError("map is not certified positive")


def state_from_positive_map(
    phi: MatrixMap,
    normalized: bool = True,
    validate: bool = True,
    cfg: OptimizerConfig | None = None,
) -> BipartiteFunctional:
    """The functional X |-> <Omega, (Phi (x) id_m)(X) Omega> on (n, m) operators.

    Requires Phi positive with tr(Phi(I_n)) = 1 (normalized trace).  With
    ``normalized=False`` the map is rescaled to satisfy the trace condition
    first.  The density of the functional is m^{-1} choi(Phi*).
    """
    m = phi.output_dim
    report = unitality_report(phi)
    norm_tr = report.normalized_trace_of_image
    if normalized:
        if abs(norm_tr - 1.0) > 1e-9:
            raise ValueError(f"tr(Phi(I)) = {norm_tr:.6g}, expected 1")
        scaled = phi
    else:
        if norm_tr <= 1e-12:
            raise ValueError("tr(Phi(I)) vanishes; cannot normalize")
        scaled = MatrixMap(phi.input_dim, phi.output_dim, phi.coeffs / norm_tr)
    if validate:
        _require_positive(scaled, cfg)
    density = choi(adjoint_map(scaled))
    return BipartiteFunctional(bipartite(density.matrix / m, density.n, density.m))


def normalize_positive_map(
    phi: MatrixMap,
    validate: bool = True,
    cfg: OptimizerConfig | None = None,
) -> tuple[MatrixMap, BipartiteFunctional]:
    """Rewrite rho_0 o (Phi (x) id) with a unital positive map.

    Given positive Phi: M_n -> M_m with tr(Phi(I)) = 1, build
    Psi(A) = R Phi(A) R + Psi_1(A) with R the inverse of Phi(I)^{1/2} on
    its range, and the state rho(X) = <Omega, (Phi(I)^{1/2} (x) I) X
    (Phi(I)^{1/2} (x) I) Omega>, so that rho o (Psi (x) id) agrees with
    rho_0 o (Phi (x) id).  Psi_1 routes through the fixed state
    sigma(A) = A[0, 0] followed by compression to the complement of the
    range projection.  Eigenvalues of Phi(I) below 1e-10 count as kernel.
    """
    n, m = phi.input_dim, phi.output_dim
    report = unitality_report(phi)
    if abs(report.normalized_trace_of_image - 1.0) > 1e-9:
        raise ValueError("tr(Phi(I)) must equal 1")
    if validate:
        _require_positive(phi, cfg)

    img = report.image_of_identity.matrix
    w, u = np.linalg.eigh(img)
    if w[0] < -1e-10:
        raise ValueError("Phi(I) is not positive semidefinite")
    on_range = w > 1e-10
    proj = (u[:, on_range] @ u[:, on_range].conj().T) if on_range.any() else np.zeros((m, m))
    inv_sqrt = np.zeros(m)
    inv_sqrt[on_range] = 1.0 / np.sqrt(w[on_range])
    r = (u * inv_sqrt) @ u.conj().T
    sqrt_img = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
    complement = np.eye(m) - proj

    def psi_action(a: np.ndarray) -> np.ndarray:
        return r @ phi.apply(a) @ r + a[0, 0] * complement

    psi = MatrixMap.from_function(n, m, psi_action)

    half = np.kron(sqrt_img, np.eye(m))
    h = h_operator(m).matrix
    rho_density = bipartite(half.conj().T @ h @ half / m, m, m)
    return psi, BipartiteFunctional(rho_density)


def random_map(input_dim: int, output_dim: int, rng: np.random.Generator) -> MatrixMap:
    """Random Hermitian-preserving map: Gaussian coefficient array."""
    return MatrixMap(
        input_dim, output_dim, rng.normal(size=(output_dim ** 2, input_dim ** 2))
    )


def random_positive_map(
    input_dim: int,
    output_dim: int,
    rng: np.random.Generator,
    terms: int = 3,
    transpose_input: bool | None = None,
    singular_image: bool = False,
    unit_trace: bool = True,
) -> MatrixMap:
    """Random positive map: sum of congruences A -> V A V*, optionally
    precomposed with the transpose (positive but typically not CP).

    With ``singular_image`` the V factors share a common output corner, so
    Phi(I) has a nontrivial kernel.  With ``unit_trace`` the map is scaled
    so that the normalized trace of Phi(I) equals one.
    """
    rows = output_dim - 1 if (singular_image and output_dim > 1) else output_dim
    vs = [
        rng.normal(size=(rows, input_dim)) + 1j * rng.normal(size=(rows, input_dim))
        for _ in range(terms)
    ]
    if rows != output_dim:
        vs = [np.vstack([v, np.zeros((1, input_dim))]) for v in vs]
    if transpose_input is None:
        transpose_input = bool(rng.integers(2))

    def action(a: np.ndarray) -> np.ndarray:
        src = a.T if transpose_input else a
        return sum(v @ src @ v.conj().T for v in vs)

    phi = MatrixMap.from_function(input_dim, output_dim, action)
    if unit_trace:
        tr = unitality_report(phi).normalized_trace_of_image
        phi = MatrixMap(input_dim, output_dim, phi.coeffs / tr)
    return phi
