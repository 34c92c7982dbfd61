"""Finite-dimensional multi-matrix algebras, their trace simplexes, and two
explicit constructions on discretized cone algebras: the bilinear
entangled witness (s, t) |-> s t S and the 2x2 Riesz-interpolation
counterexample.

The cone algebra {f in C([0,1], M_k) : f(0) scalar} is discretized on a
finite grid; the witness below is bilinear in (s, t), so checking it on
grid points covers the construction exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import BipartiteOperator, bipartite, min_eigenvalue, swap_operator
from .polytopes import Polytope, affine_dimension, min_tensor, simplex


@dataclass(frozen=True)
class MultiMatrixAlgebra:
    """Direct sum of matrix algebras, recorded by block sizes."""

    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) == 0:
            raise ValueError("need at least one block")
        if any(b < 1 for b in self.blocks):
            raise ValueError("block sizes must be >= 1")
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


def trace_simplex(algebra: MultiMatrixAlgebra) -> Polytope:
    """Tracial states of a block-diagonal algebra: the simplex on the block traces."""
    return simplex(algebra.n_blocks - 1)


def algebra_tensor(a: MultiMatrixAlgebra, b: MultiMatrixAlgebra) -> MultiMatrixAlgebra:
    """Tensor product block structure: all products n_i * m_j, lexicographic."""
    return MultiMatrixAlgebra(tuple(x * y for x in a.blocks for y in b.blocks))


@dataclass(frozen=True)
class TraceTensorReport:
    blocks_a: tuple[int, ...]
    blocks_b: tuple[int, ...]
    blocks_product: tuple[int, ...]
    block_count_ok: bool
    tensor_vertex_count: int
    affinely_independent: bool
    tensor_dimension: int
    isomorphic: bool
    passes: bool


def verify_trace_tensor(a: MultiMatrixAlgebra, b: MultiMatrixAlgebra) -> TraceTensorReport:
    """Check that trace simplexes tensor multiplicatively.

    The tensor of the two trace simplexes must be affinely isomorphic to
    the trace simplex of the tensor algebra: same vertex count as blocks of
    the product, affinely independent vertices, dimension count - 1.
    """
    prod = algebra_tensor(a, b)
    expected = a.n_blocks * b.n_blocks
    count_ok = prod.n_blocks == expected

    tensored = min_tensor(trace_simplex(a), trace_simplex(b))
    n_vertices = tensored.n_vertices
    dim = affine_dimension(tensored)
    independent = n_vertices == expected and dim == expected - 1
    target = trace_simplex(prod)
    isomorphic = independent and target.n_vertices == n_vertices
    return TraceTensorReport(
        blocks_a=a.blocks,
        blocks_b=b.blocks,
        blocks_product=prod.blocks,
        block_count_ok=count_ok,
        tensor_vertex_count=n_vertices,
        affinely_independent=independent,
        tensor_dimension=dim,
        isomorphic=isomorphic,
        passes=count_ok and isomorphic,
    )


@dataclass(frozen=True)
class GridConeElement:
    """Matrix-valued function on a grid in [0, 1], scalar at the base point.

    Realizes elements of the discretized algebra {f : f(0) in C.1}; the
    grid must be strictly increasing and contain both endpoints.
    """

    n: int
    grid: tuple[float, ...]
    values: np.ndarray
    scalar_at_zero: bool = True

    def __post_init__(self) -> None:
        g = tuple(float(s) for s in self.grid)
        if any(s < 0.0 or s > 1.0 for s in g):
            raise ValueError("grid points must lie in [0, 1]")
        if any(g[i] >= g[i + 1] for i in range(len(g) - 1)):
            raise ValueError("grid must be strictly increasing")
        if g[0] != 0.0 or g[-1] != 1.0:
            raise ValueError("grid must contain 0 and 1")
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (len(g), self.n, self.n):
            raise ValueError(f"values must have shape {(len(g), self.n, self.n)}")
        if self.scalar_at_zero:
            v0 = vals[0]
            lam = np.trace(v0) / self.n
            if abs(lam.imag) > 1e-12 or np.max(np.abs(v0 - lam.real * np.eye(self.n))) > 1e-12:
                raise ValueError("value at 0 must be a real multiple of the identity")
        object.__setattr__(self, "grid", g)
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def at(self, s: float) -> np.ndarray:
        try:
            idx = self.grid.index(float(s))
        except ValueError:
            raise KeyError(f"{s} is not a grid point") from None
        return self.values[idx]


def _check_grid(grid) -> tuple[float, ...]:
    g = tuple(sorted(set(float(s) for s in grid)))
    if len(g) == 0:
        raise ValueError("grid must be nonempty")
    if g[0] < 0.0 or g[-1] > 1.0:
        raise ValueError("grid points must lie in [0, 1]")
    return g


@dataclass(frozen=True)
class GridWitness:
    """The two-variable matrix function (s, t) |-> s t S on a grid.

    Nonpositive as an element of the tensor algebra, yet nonnegative on
    every product of states; bilinear, so grid evaluation is exact."""

    n: int
    grid: tuple[float, ...]

    def __call__(self, s: float, t: float) -> BipartiteOperator:
        return self.at(s, t)

    def at(self, s: float, t: float) -> BipartiteOperator:
        swap = swap_operator(self.n)
        return bipartite((s * t) * swap.matrix, self.n, self.n)

    def section_left(self, s: float) -> GridConeElement:
        """X(s, .) as a grid function of the second variable."""
        swap = swap_operator(self.n).matrix
        vals = np.array([(s * t) * swap for t in self.grid])
        return GridConeElement(self.n * self.n, self.grid, vals)


def entangled_witness_X(n: int, grid) -> GridWitness:
    if n < 2:
        raise ValueError("need matrix size n >= 2")
    return GridWitness(n, _check_grid(grid))


@dataclass(frozen=True)
class XSeparationReport:
    n: int
    grid: tuple[float, ...]
    samples: int
    seed: int
    most_negative_eigenvalue: float
    argmin_pair: tuple[float, float]
    nonpositive_ok: bool
    separable_min: float
    separable_ok: bool
    passes: bool


def verify_X_separating(
    n: int, grid, samples: int = 100_000, seed: int = 0
) -> XSeparationReport:
    """Check both halves of the witness property of X(s, t) = s t S.

    (a) nonpositivity: some grid evaluation has a negative eigenvalue;
    (b) nonnegativity on separable states: for sampled (s, t, pure sigma_1,
    pure sigma_2), the value s t <sigma_1 (x) sigma_2, S (...)> stays above
    -1e-9.  Pure states of the discretized algebra are exactly (grid point,
    pure matrix state) pairs, which is what the sampler draws.
    """
    witness = entangled_witness_X(n, grid)
    g = np.array(witness.grid)
    if g.max() <= 0.0:
        raise ValueError("grid needs a point pair with s, t > 0")

    most_neg = np.inf
    argmin = (0.0, 0.0)
    for s in witness.grid:
        for t in witness.grid:
            val = min_eigenvalue(witness.at(s, t))
            if val < most_neg:
                most_neg, argmin = val, (s, t)
    nonpositive_ok = most_neg < -1e-9

    rng = np.random.default_rng(seed)
    ss = rng.choice(g, size=samples)
    tt = rng.choice(g, size=samples)
    v1 = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    v2 = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    v1 /= np.linalg.norm(v1, axis=1, keepdims=True)
    v2 /= np.linalg.norm(v2, axis=1, keepdims=True)
    prod = np.einsum("bi,bj->bij", v1, v2).reshape(samples, n * n)
    swap = swap_operator(n).matrix
    vals = (ss * tt) * np.einsum("bi,ij,bj->b", prod.conj(), swap, prod).real
    separable_min = float(vals.min())
    separable_ok = separable_min >= -1e-9

    return XSeparationReport(
        n=n,
        grid=witness.grid,
        samples=samples,
        seed=seed,
        most_negative_eigenvalue=float(most_neg),
        argmin_pair=argmin,
        nonpositive_ok=nonpositive_ok,
        separable_min=separable_min,
        separable_ok=separable_ok,
        passes=nonpositive_ok and separable_ok,
    )


@dataclass(frozen=True)
class RieszReport:
    dominated_ok: bool
    eigs_e11_minus_f: tuple[float, float]
    eigs_e22_minus_f: tuple[float, float]
    not_below_zero_ok: bool
    eigs_f: tuple[float, float]
    interpolation_ok: bool
    admissible_points: int
    max_admissible_norm: float
    grid_step: float
    zero_threshold: float
    passes: bool


def riesz_counterexample_check(
    step: float = 0.02, zero_threshold: float = 0.05
) -> RieszReport:
    """Verify the 2x2 failure of Riesz interpolation, deterministically.

    With F = [[-2/3, 1], [1, -2/3]]:
    (a) E11 - F and E22 - F are positive semidefinite,
    (b) F has a positive eigenvalue (so F is not below 0),
    (c) brute force over the grid of 2x2 PSD matrices C with trace <= 2
        (Bloch parameterization at the given step): every C with C <= E11
        and C <= E22 has norm below the zero threshold, approximating that
        only C = 0 interpolates.

    A 2x2 Hermitian C = ((tau + z) / 2, (x - iy) / 2; (x + iy) / 2,
    (tau - z) / 2) is PSD iff |(x, y, z)| <= tau, and C <= E iff the same
    closed form holds for E - C, so the sweep is exact arithmetic on the
    grid.
    """
    f = np.array([[-2.0 / 3.0, 1.0], [1.0, -2.0 / 3.0]])
    e11 = np.diag([1.0, 0.0])
    e22 = np.diag([0.0, 1.0])
    eig1 = tuple(float(v) for v in np.linalg.eigvalsh(e11 - f))
    eig2 = tuple(float(v) for v in np.linalg.eigvalsh(e22 - f))
    dominated_ok = eig1[0] >= -1e-12 and eig2[0] >= -1e-12
    eigf = tuple(float(v) for v in np.linalg.eigvalsh(f))
    not_below_zero_ok = eigf[-1] > 1e-12

    n_half = int(round(1.0 / step))
    taus = np.linspace(0.0, 2.0, 2 * n_half + 1)
    axis = np.linspace(-1.0, 1.0, 2 * n_half + 1)
    xx, yy, zz = (v.ravel() for v in np.meshgrid(axis, axis, axis, indexing="ij"))
    r2 = xx * xx + yy * yy
    bloch = np.sqrt(r2 + zz * zz)
    # C <= E11: 1 - tau >= |(x, y, z - 1)|;  C <= E22: 1 - tau >= |(x, y, z + 1)|
    need = np.maximum(np.sqrt(r2 + (zz - 1.0) ** 2), np.sqrt(r2 + (zz + 1.0) ** 2))
    tol = 1e-12
    admissible = 0
    max_norm = 0.0
    for tau in taus:
        mask = (bloch <= tau + tol) & (need <= 1.0 - tau + tol)
        count = int(mask.sum())
        if count:
            admissible += count
            max_norm = max(max_norm, float((tau + bloch[mask].max()) / 2.0))
    interpolation_ok = max_norm < zero_threshold

    return RieszReport(
        dominated_ok=dominated_ok,
        eigs_e11_minus_f=eig1,
        eigs_e22_minus_f=eig2,
        not_below_zero_ok=not_below_zero_ok,
        eigs_f=eigf,
        interpolation_ok=interpolation_ok,
        admissible_points=admissible,
        max_admissible_norm=max_norm,
        grid_step=step,
        zero_threshold=zero_threshold,
        passes=dominated_ok and not_below_zero_ok and interpolation_ok,
    )
