import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab.cones import OptimizerConfig, Status
from conelab.maps import (
    MatrixMap,
    adjoint_map,
    apply_to_left_factor,
    basis_coefficients,
    choi,
    hermitian_basis,
    is_positive_map,
    jamiolkowski,
    map_from_choi,
    matrix_from_coefficients,
    normalize_positive_map,
    random_map,
    random_positive_map,
    state_from_positive_map,
    unitality_report,
)
from conelab.operators import (
    bipartite,
    h_operator,
    partial_transpose,
    random_hermitian,
    rho0_apply,
    swap_operator,
    tensor,
)

FAST = OptimizerConfig(starts=40, steps=120, seed=0)


@st.composite
def map_dims(draw):
    return draw(st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))


class TestHermitianBasis:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_orthonormal(self, n):
        b = hermitian_basis(n)
        gram = np.einsum("kpq,lqp->kl", b, b)
        assert np.allclose(gram, np.eye(n * n), atol=1e-14)

    def test_roundtrip_complex_matrix(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        c = basis_coefficients(m)
        assert np.allclose(matrix_from_coefficients(c, 3), m, atol=1e-13)


class TestChoiJamiolkowski:
    def test_identity_map(self):
        assert np.allclose(choi(MatrixMap.identity(2)).matrix, h_operator(2).matrix, atol=1e-14)
        assert np.allclose(
            jamiolkowski(MatrixMap.identity(2)).matrix, swap_operator(2).matrix, atol=1e-14
        )

    def test_transpose_map(self):
        t2 = MatrixMap.transpose(2)
        assert np.allclose(choi(t2).matrix, swap_operator(2).matrix, atol=1e-14)
        assert np.allclose(jamiolkowski(t2).matrix, h_operator(2).matrix, atol=1e-14)

    def test_trace_state_map(self):
        phi = MatrixMap.trace_state(2, 2)
        assert np.allclose(choi(phi).matrix, np.eye(4) / 2, atol=1e-14)

    @given(map_dims(), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_pt_identity_and_roundtrip(self, dims, seed):
        out_dim, in_dim = dims
        psi = random_map(in_dim, out_dim, np.random.default_rng(seed))
        c = choi(psi)
        j = jamiolkowski(psi)
        assert np.max(np.abs(partial_transpose(j, "right").matrix - c.matrix)) < 1e-12
        back = map_from_choi(c)
        assert np.max(np.abs(back.coeffs - psi.coeffs)) < 1e-12

    def test_map_from_choi_examples(self):
        assert np.allclose(
            map_from_choi(h_operator(2)).coeffs, MatrixMap.identity(2).coeffs, atol=1e-13
        )
        assert np.allclose(
            map_from_choi(swap_operator(2)).coeffs, MatrixMap.transpose(2).coeffs, atol=1e-13
        )

    def test_choi_shape_records_direction(self):
        psi = random_map(3, 2, np.random.default_rng(1))  # M_3 -> M_2
        c = choi(psi)
        assert (c.n, c.m) == (2, 3)


class TestPositivity:
    def test_transpose_positive(self):
        assert is_positive_map(MatrixMap.transpose(2), cfg=FAST).status is Status.IN

    def test_negative_choi_out(self):
        bad = map_from_choi(bipartite(-np.eye(4), 2, 2))
        assert is_positive_map(bad, cfg=FAST).status is Status.OUT

    def test_reduction_positive(self):
        v = is_positive_map(MatrixMap.reduction(2), cfg=FAST)
        assert v.status is Status.IN
        assert v.certificate.best_value >= -1e-9

    def test_transpose_not_completely_positive(self):
        # positive map whose Choi matrix fails PSD: the canonical example
        t2 = MatrixMap.transpose(2)
        assert np.linalg.eigvalsh(choi(t2).matrix)[0] == pytest.approx(-1.0, abs=1e-12)
        ident = MatrixMap.identity(2)
        assert np.linalg.eigvalsh(choi(ident).matrix)[0] >= -1e-12


class TestAdjoint:
    def test_transpose_self_adjoint(self):
        t = MatrixMap.transpose(3)
        assert np.allclose(adjoint_map(t).coeffs, t.coeffs, atol=0)

    def test_involution(self):
        psi = random_map(2, 3, np.random.default_rng(5))
        assert np.array_equal(adjoint_map(adjoint_map(psi)).coeffs, psi.coeffs)

    def test_pairing_identity(self):
        rng = np.random.default_rng(6)
        psi = random_map(2, 3, rng)
        for _ in range(20):
            a = random_hermitian(2, rng).matrix
            b = random_hermitian(3, rng).matrix
            lhs = np.trace(psi.apply(a) @ b)
            rhs = np.trace(a @ adjoint_map(psi).apply(b))
            assert lhs.real == pytest.approx(rhs.real, abs=1e-12)

    def test_adjoint_of_unital_positive_is_trace_preserving(self):
        rng = np.random.default_rng(7)
        phi = MatrixMap.reduction(2)
        adj = adjoint_map(phi)
        for _ in range(10):
            b = random_hermitian(2, rng).matrix
            assert np.trace(adj.apply(b)).real == pytest.approx(
                np.trace(phi.apply(np.eye(2)) @ b).real, abs=1e-12
            )


class TestStateFromPositiveMap:
    def test_identity_gives_maximally_entangled_functional(self):
        rng = np.random.default_rng(8)
        phi = MatrixMap.identity(2)
        f = state_from_positive_map(phi, cfg=FAST)
        for _ in range(20):
            x = bipartite(random_hermitian(4, rng).matrix, 2, 2)
            assert f(x) == pytest.approx(rho0_apply(2, x), abs=1e-12)

    def test_transpose_gives_swap_functional(self):
        f = state_from_positive_map(MatrixMap.transpose(2), cfg=FAST)
        assert np.allclose(f.density.matrix, swap_operator(2).matrix / 2, atol=1e-12)

    def test_trace_state_gives_product_functional(self):
        f = state_from_positive_map(MatrixMap.trace_state(2, 2), cfg=FAST)
        assert np.allclose(f.density.matrix, np.eye(4) / 4, atol=1e-12)

    def test_unital_value(self):
        f = state_from_positive_map(MatrixMap.reduction(2), cfg=FAST)
        assert f.value_on_identity() == pytest.approx(1.0, abs=1e-12)

    def test_nonnegative_on_separable_cone(self):
        rng = np.random.default_rng(9)
        phi = random_positive_map(2, 2, rng, transpose_input=True)
        f = state_from_positive_map(phi, cfg=FAST)
        from conelab.cones import random_product_state

        for _ in range(200):
            t = random_product_state(2, 2, rng).projector()
            assert f(t) >= -1e-9

    def test_rejects_unnormalized(self):
        phi = MatrixMap.identity(2)
        doubled = MatrixMap(2, 2, 2 * phi.coeffs)
        with pytest.raises(ValueError, match="expected 1"):
            state_from_positive_map(doubled, cfg=FAST)

    def test_normalized_flag_rescales(self):
        phi = MatrixMap.identity(2)
        doubled = MatrixMap(2, 2, 2 * phi.coeffs)
        f = state_from_positive_map(doubled, normalized=False, cfg=FAST)
        assert f.value_on_identity() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nonpositive_map(self):
        rng = np.random.default_rng(10)
        bad = random_map(2, 2, rng)
        rep = unitality_report(bad)
        scaled = MatrixMap(2, 2, bad.coeffs / rep.normalized_trace_of_image)
        with pytest.raises(ValueError, match="not certified positive"):
            state_from_positive_map(scaled, cfg=FAST)


class TestNormalizeConstruction:
    def test_already_unital_is_fixed_point(self):
        phi = MatrixMap.reduction(2)  # unital: Tr(A) I - A maps I to I
        psi, rho = normalize_positive_map(phi, cfg=FAST)
        assert np.allclose(psi.coeffs, phi.coeffs, atol=1e-10)
        assert np.allclose(rho.density.matrix, h_operator(2).matrix / 2, atol=1e-12)

    def test_rank_deficient_example(self):
        # Phi(A) = diag(2 A_00, 0): positive, tr(Phi(I)) = 1, singular image
        phi = MatrixMap.from_function(2, 2, lambda a: np.diag([2 * a[0, 0], 0.0]))
        psi, rho = normalize_positive_map(phi, cfg=FAST)
        # construction routes the complement through sigma(A) = A_00: Psi(A) = A_00 I
        assert np.allclose(psi.apply(np.diag([1.0, 0.0])), np.eye(2), atol=1e-10)
        assert np.allclose(psi.apply(np.diag([0.0, 1.0])), np.zeros((2, 2)), atol=1e-10)
        rep = unitality_report(psi)
        assert rep.is_unital

    def test_agreement_on_random_maps(self):
        rng = np.random.default_rng(12)
        for singular in (False, True):
            phi = random_positive_map(2, 2, rng, singular_image=singular)
            psi, rho = normalize_positive_map(phi, cfg=FAST)
            assert unitality_report(psi).is_unital
            assert is_positive_map(psi, cfg=FAST).status is Status.IN
            for _ in range(50):
                x = bipartite(random_hermitian(4, rng).matrix, 2, 2)
                lhs = rho0_apply(2, apply_to_left_factor(phi, x))
                rhs = rho(apply_to_left_factor(psi, x))
                assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_rejects_wrong_trace(self):
        phi = MatrixMap(2, 2, 2 * MatrixMap.identity(2).coeffs)
        with pytest.raises(ValueError, match="must equal 1"):
            normalize_positive_map(phi, cfg=FAST)


class TestApplyToLeftFactor:
    def test_product_action(self):
        rng = np.random.default_rng(13)
        phi = random_map(2, 3, rng)
        a = random_hermitian(2, rng)
        b = random_hermitian(2, rng)
        got = apply_to_left_factor(phi, tensor(a, b))
        want = np.kron(phi.apply(a.matrix), b.matrix)
        assert np.allclose(got.matrix, want, atol=1e-12)
        assert (got.n, got.m) == (3, 2)

    def test_dimension_check(self):
        phi = MatrixMap.identity(3)
        with pytest.raises(ValueError, match="input dim"):
            apply_to_left_factor(phi, bipartite(np.eye(4), 2, 2))
