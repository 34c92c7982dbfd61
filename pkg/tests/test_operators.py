import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab.operators import (
    BipartiteOperator,
    HermitianOperator,
    ProductVector,
    bipartite,
    h_operator,
    hermitian,
    maximally_entangled_vector,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    random_hermitian,
    rho0_apply,
    swap_operator,
    tensor,
    trace_norm,
)


def _e(i, j, n=2):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


@st.composite
def hermitians(draw, max_dim=3):
    dim = draw(st.integers(1, max_dim))
    vals = draw(
        st.lists(
            st.floats(-2, 2, allow_nan=False, allow_infinity=False),
            min_size=2 * dim * dim,
            max_size=2 * dim * dim,
        )
    )
    re = np.array(vals[: dim * dim]).reshape(dim, dim)
    im = np.array(vals[dim * dim :]).reshape(dim, dim)
    g = re + 1j * im
    return HermitianOperator((g + g.conj().T) / 2)


class TestConstruction:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            hermitian([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            hermitian(np.zeros((2, 3)))

    def test_symmetrizes_benign_rounding(self):
        a = np.array([[1.0, 0.5 + 1e-14j], [0.5 - 3e-14j, 2.0]])
        op = hermitian(a)
        assert np.array_equal(op.matrix, op.matrix.conj().T)

    def test_bipartite_dimension_mismatch(self):
        with pytest.raises(ValueError, match="n\\*m"):
            BipartiteOperator(2, 3, hermitian(np.eye(4)))

    def test_product_vector_requires_unit_norm(self):
        with pytest.raises(ValueError, match="unit vector"):
            ProductVector(np.array([1.0, 1.0]), np.array([1.0, 0.0]))

    def test_matrices_are_immutable(self):
        op = hermitian(np.eye(2))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 5.0


class TestTensor:
    def test_identity(self):
        t = tensor(hermitian(np.eye(2)), hermitian(np.eye(2)))
        assert np.array_equal(t.matrix, np.eye(4))
        assert (t.n, t.m) == (2, 2)

    def test_matrix_units(self):
        t = tensor(hermitian(_e(0, 0)), hermitian(_e(1, 1)))
        assert np.array_equal(t.matrix, np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_diagonal_signs(self):
        z = hermitian(np.diag([1.0, -1.0]))
        assert np.array_equal(tensor(z, z).matrix, np.diag([1.0, -1.0, -1.0, 1.0]))


class TestPartialTranspose:
    def test_swap_becomes_h(self):
        assert np.array_equal(
            partial_transpose(swap_operator(2), "right").matrix, h_operator(2).matrix
        )

    def test_identity_fixed(self):
        i4 = bipartite(np.eye(4), 2, 2)
        assert np.array_equal(partial_transpose(i4, "right").matrix, np.eye(4))

    @given(hermitians(max_dim=6), st.sampled_from(["left", "right"]))
    @settings(max_examples=40, deadline=None)
    def test_involution_and_exact_trace(self, op, side):
        dim = op.dim
        n = 2 if dim % 2 == 0 else 1
        if dim % n:
            return
        x = BipartiteOperator(n, dim // n, op)
        pt = partial_transpose(x, side)
        assert np.array_equal(partial_transpose(pt, side).matrix, x.matrix)
        assert np.trace(pt.matrix) == np.trace(x.matrix)
        assert np.array_equal(pt.matrix, pt.matrix.conj().T)

    def test_left_right_compose_to_full_transpose(self):
        rng = np.random.default_rng(3)
        x = bipartite(random_hermitian(6, rng).matrix, 2, 3)
        both = partial_transpose(partial_transpose(x, "left"), "right")
        assert np.allclose(both.matrix, x.matrix.T, atol=0)


class TestPartialTrace:
    def test_product_case(self):
        rng = np.random.default_rng(0)
        a, b = random_hermitian(2, rng), random_hermitian(3, rng)
        left = partial_trace(tensor(a, b), "right")
        assert np.allclose(left.matrix, np.trace(b.matrix) * a.matrix, atol=1e-12)

    def test_h_right_marginal_is_identity(self):
        assert np.allclose(partial_trace(h_operator(2), "right").matrix, np.eye(2), atol=0)

    def test_swap_left_marginal_is_identity(self):
        assert np.allclose(partial_trace(swap_operator(2), "left").matrix, np.eye(2), atol=0)

    def test_preserves_trace(self):
        rng = np.random.default_rng(1)
        x = bipartite(random_hermitian(6, rng).matrix, 3, 2)
        for side in ("left", "right"):
            assert partial_trace(x, side).trace() == pytest.approx(x.op.trace(), abs=1e-12)


class TestSpectralQuantities:
    def test_trace_norm_identity(self):
        assert trace_norm(hermitian(np.eye(2))) == pytest.approx(2.0, abs=1e-12)

    def test_trace_norm_swap(self):
        # eigenvalues of the 2x2 swap: {1, 1, 1, -1}
        assert trace_norm(swap_operator(2)) == pytest.approx(4.0, abs=1e-12)

    def test_trace_norm_normalized_swap(self):
        s = swap_operator(3)
        assert trace_norm(bipartite(s.matrix / 3, 3, 3)) == pytest.approx(3.0, abs=1e-11)

    def test_min_eigenvalue_examples(self):
        assert min_eigenvalue(hermitian(np.eye(3))) == pytest.approx(1.0, abs=1e-12)
        assert min_eigenvalue(swap_operator(2)) == pytest.approx(-1.0, abs=1e-12)
        # H has eigenvalues {2, 0, 0, 0}
        assert min_eigenvalue(h_operator(2)) == pytest.approx(0.0, abs=1e-12)

    @given(hermitians(max_dim=2), hermitians(max_dim=2))
    @settings(max_examples=50, deadline=None)
    def test_trace_norm_multiplicative(self, a, b):
        lhs = trace_norm(tensor(a, b))
        rhs = trace_norm(a) * trace_norm(b)
        assert lhs == pytest.approx(rhs, abs=1e-9, rel=1e-9)


class TestCanonicalOperators:
    def test_swap_scalar(self):
        assert np.array_equal(swap_operator(1).matrix, [[1.0]])

    def test_swap_matrix(self):
        want = np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float
        )
        assert np.array_equal(swap_operator(2).matrix, want)

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_swap_is_involution(self, m):
        s = swap_operator(m).matrix
        assert np.array_equal(s @ s, np.eye(m * m))

    @pytest.mark.parametrize("m", [2, 3, 4, 5])
    def test_swap_eigenvalue_multiplicities(self, m):
        w = np.linalg.eigvalsh(swap_operator(m).matrix)
        assert int(np.sum(np.abs(w - 1) < 1e-9)) == m * (m + 1) // 2
        assert int(np.sum(np.abs(w + 1) < 1e-9)) == m * (m - 1) // 2

    def test_h_matrix(self):
        want = np.array(
            [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]], dtype=float
        )
        assert np.array_equal(h_operator(2).matrix, want)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_h_rank_one_and_trace(self, m):
        w = np.linalg.eigvalsh(h_operator(m).matrix)
        assert int(np.sum(w > 1e-9)) == 1
        assert w[-1] == pytest.approx(m, abs=1e-12)
        assert np.trace(h_operator(m).matrix).real == pytest.approx(m, abs=0)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_h_is_partial_transpose_of_swap(self, m):
        assert np.array_equal(
            h_operator(m).matrix, partial_transpose(swap_operator(m), "right").matrix
        )


class TestMaximallyEntangledFunctional:
    def test_on_tensor_with_identity(self):
        rng = np.random.default_rng(7)
        for m in (2, 3):
            a = random_hermitian(m, rng)
            got = rho0_apply(m, tensor(a, hermitian(np.eye(m))))
            assert got == pytest.approx(np.trace(a.matrix).real / m, abs=1e-12)

    def test_on_h(self):
        assert rho0_apply(2, h_operator(2)) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_unital(self, m):
        assert rho0_apply(m, bipartite(np.eye(m * m), m, m)) == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="does not match"):
            rho0_apply(3, bipartite(np.eye(4), 2, 2))

    @given(hermitians(max_dim=2))
    @settings(max_examples=30, deadline=None)
    def test_equals_h_pairing(self, op):
        m = op.dim
        x = tensor(op, op)
        via_omega = rho0_apply(m, x)
        via_h = np.trace(h_operator(m).matrix @ x.matrix).real / m
        assert via_omega == pytest.approx(via_h, abs=1e-12)

    def test_omega_is_unit(self):
        for m in (1, 2, 5):
            assert np.linalg.norm(maximally_entangled_vector(m)) == pytest.approx(1.0, abs=1e-12)
