import numpy as np
import pytest

from conelab.cones import OptimizerConfig, Status
from conelab.kappa import (
    CbConfig,
    cb_norm_estimate,
    embedded_swap,
    extremal_positive_map,
    kappa_exact,
    kappa_report,
    kappa_witness,
    max_norm_of_functional,
    polytope_max_norm,
)
from conelab.maps import MatrixMap, apply_to_left_factor, unitality_report
from conelab.operators import bipartite, operator_norm, random_density, swap_operator
from conelab.polytopes import (
    functional_from_flat,
    max_tensor_polytope,
    min_tensor,
    relative_bound,
    square,
)

FAST = OptimizerConfig(starts=40, steps=120, seed=0)
CB_FAST = CbConfig(starts=30, steps=120, seed=0)


class TestClosedForm:
    def test_examples(self):
        assert kappa_exact(3, 7) == 3.0
        assert kappa_exact(1, 5) == 1.0
        assert kappa_exact(4, 4) == 4.0

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            kappa_exact(0, 2)


class TestMaxNorm:
    def test_states_have_norm_one(self):
        rng = np.random.default_rng(0)
        for n, m in [(2, 2), (2, 3)]:
            t = bipartite(random_density(n * m, rng).matrix, n, m)
            assert max_norm_of_functional(t) == pytest.approx(1.0, abs=1e-9)

    def test_normalized_swap(self):
        s = swap_operator(2)
        assert max_norm_of_functional(bipartite(s.matrix / 2, 2, 2)) == pytest.approx(
            2.0, abs=1e-12
        )

    def test_sign_invariance(self):
        s = swap_operator(3)
        assert max_norm_of_functional(bipartite(-s.matrix / 3, 3, 3)) == pytest.approx(
            3.0, abs=1e-11
        )


class TestWitness:
    def test_scalar_case(self):
        w = kappa_witness(1, cfg=FAST)
        assert np.array_equal(w.functional.matrix, [[1.0]])
        assert w.value == pytest.approx(1.0, abs=1e-12)

    def test_two_by_two(self):
        w = kappa_witness(2, cfg=FAST)
        assert np.allclose(w.functional.matrix, swap_operator(2).matrix / 2, atol=0)
        assert w.value == pytest.approx(2.0, abs=1e-12)
        assert w.block_positive.status is Status.IN

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_matches_closed_form(self, n):
        w = kappa_witness(n, cfg=OptimizerConfig(starts=30, steps=80, seed=0))
        assert w.value == pytest.approx(kappa_exact(n, n), abs=1e-9)
        assert abs(w.functional.op.trace() - 1.0) < 1e-12


class TestCbEstimate:
    def test_identity_map(self):
        est = cb_norm_estimate(MatrixMap.identity(3), CB_FAST)
        assert est.value == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n", [2, 3])
    def test_transpose_map(self, n):
        est = cb_norm_estimate(MatrixMap.transpose(n), CB_FAST)
        assert n * 0.95 <= est.value <= n + 1e-9
        # reported maximizer is an admissible certificate
        assert operator_norm(est.argmax) <= 1.0 + 1e-9
        out = apply_to_left_factor(MatrixMap.transpose(n), est.argmax)
        assert operator_norm(out) == pytest.approx(est.value, abs=1e-9)

    def test_unital_positive_maps_below_closed_form(self):
        rng = np.random.default_rng(1)
        n = m = 2
        for trial in range(20):
            phi = _random_unital_positive(n, rng)
            est = cb_norm_estimate(phi, CbConfig(starts=10, steps=60, seed=trial))
            assert est.value <= kappa_exact(n, m) + 1e-6

    def test_extremal_map_attains(self):
        for n, m in [(2, 3), (3, 2)]:
            phi = extremal_positive_map(n, m)
            assert unitality_report(phi).is_unital
            est = cb_norm_estimate(phi, CB_FAST)
            assert est.value == pytest.approx(kappa_exact(n, m), abs=1e-6)

    def test_induced_state_functionals_bounded_by_closed_form(self):
        from conelab.maps import state_from_positive_map

        rng = np.random.default_rng(2)
        n = m = 2
        for trial in range(10):
            phi = _random_unital_positive(n, rng)
            f = state_from_positive_map(phi, cfg=FAST)
            norm = max_norm_of_functional(f.density)
            assert 1.0 - 1e-9 <= norm <= kappa_exact(n, m) + 1e-6
        # the transpose map attains the top of the range
        f = state_from_positive_map(MatrixMap.transpose(2), cfg=FAST)
        assert max_norm_of_functional(f.density) == pytest.approx(2.0, abs=1e-9)


def _random_unital_positive(n, rng):
    """Convex combination of unital positive maps: unitary conjugations,
    transpose-twisted conjugations, and the diagonal pinching."""
    def haar_unitary():
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, r = np.linalg.qr(g)
        return q * (np.diagonal(r) / np.abs(np.diagonal(r)))

    u1, u2 = haar_unitary(), haar_unitary()
    w = rng.dirichlet(np.ones(3))

    def action(a):
        conj = u1 @ a @ u1.conj().T
        twist = u2 @ a.T @ u2.conj().T
        pinch = np.diag(np.diagonal(a))
        return w[0] * conj + w[1] * twist + w[2] * pinch

    return MatrixMap.from_function(n, n, action)


class TestReport:
    def test_square_case(self):
        rep = kappa_report(2, 2, cb_cfg=CB_FAST)
        assert rep.exact == 2.0
        assert rep.witness_lower_bound == pytest.approx(2.0, abs=1e-9)
        assert 1.9 <= rep.cb_estimate <= 2.0 + 1e-9

    def test_rectangular_case(self):
        rep = kappa_report(2, 3, cb_cfg=CB_FAST)
        assert rep.exact == 2.0
        assert rep.witness_lower_bound == pytest.approx(2.0, abs=1e-9)
        assert rep.cb_estimate <= 2.0 + 1e-6
        assert (rep.witness.n, rep.witness.m) == (2, 3)

    def test_embedded_swap_norm_one(self):
        assert operator_norm(embedded_swap(2, 3)) == pytest.approx(1.0, abs=1e-12)


class TestPolytopeLinkage:
    def test_max_norm_bounded_by_relative_bound(self):
        sq = square()
        mn = min_tensor(sq, sq)
        mx = max_tensor_polytope(sq, sq)
        r = relative_bound(mn, mx)
        worst = max(
            polytope_max_norm(functional_from_flat(v, sq, sq), sq, sq)
            for v in mx.vertices
        )
        assert worst <= 2 * r + 1 + 1e-6

    def test_min_vertices_have_norm_one(self):
        sq = square()
        mn = min_tensor(sq, sq)
        val = polytope_max_norm(functional_from_flat(mn.vertices[0], sq, sq), sq, sq)
        assert val == pytest.approx(1.0, abs=1e-9)
