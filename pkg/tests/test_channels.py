import math

import numpy as np
import pytest

from qdpi import channels as chn
from qdpi import linalg as la
from qdpi import states as st
from qdpi.errors import DimensionMismatch, InfeasibleDims, InvalidChannel, InvalidPOVM


def _random_pair(rng):
    d_in, d_out = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    k = int(rng.integers(math.ceil(d_in / d_out), 5))
    return chn.random_channel(d_in, d_out, k, rng), st.random_density(d_in, rng)


class TestKrausChannel:
    def test_rejects_non_trace_preserving(self):
        with pytest.raises(InvalidChannel, match="trace preserving"):
            chn.KrausChannel([0.5 * np.eye(2)])

    def test_rejects_mixed_shapes(self):
        with pytest.raises(InvalidChannel):
            chn.KrausChannel([np.eye(2), np.zeros((3, 2))])

    def test_identity(self, rng):
        a = st.random_density(3, rng).matrix
        np.testing.assert_allclose(chn.apply(chn.identity_channel(3), a), a, atol=1e-15)

    def test_depolarizing(self, rng):
        out = chn.apply(chn.completely_depolarizing(3, 2), st.random_density(3, rng).matrix)
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            chn.apply(chn.identity_channel(2), np.eye(3) / 3)

    def test_maps_states_to_states(self, rng):
        for _ in range(1000):
            ch, rho = _random_pair(rng)
            st.DensityOperator(chn.apply(ch, rho.matrix))

    def test_random_channel_seeded(self):
        a = chn.random_channel(3, 2, 3, np.random.default_rng(5))
        b = chn.random_channel(3, 2, 3, np.random.default_rng(5))
        for x, y in zip(a.kraus_ops, b.kraus_ops):
            np.testing.assert_array_equal(x, y)

    def test_random_channel_infeasible(self, rng):
        with pytest.raises(InfeasibleDims):
            chn.random_channel(4, 2, 1, rng)


class TestDual:
    def test_duality(self, rng):
        for _ in range(300):
            ch, rho = _random_pair(rng)
            b = la.random_complex((ch.dim_out, ch.dim_out), rng)
            lhs = np.trace(chn.apply(ch, rho.matrix) @ b)
            rhs = np.trace(rho.matrix @ chn.dual(ch)(b))
            assert abs(lhs - rhs) <= 1e-10

    def test_unital(self, rng):
        for _ in range(300):
            ch, _ = _random_pair(rng)
            assert chn.dual(ch).unitality_defect() <= chn.TOL_TP

    def test_schwarz(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            ch, _ = _random_pair(rng)
            assert chn.schwarz_check(ch, 25, seed=seed).passed

    def test_schwarz_identity_is_equality(self, rng):
        x = la.random_complex((3, 3), rng)
        assert abs(chn.schwarz_gap(chn.identity_channel(3), x)) <= 1e-12
        assert abs(chn.schwarz_gap(chn.identity_channel(3), np.eye(3))) <= 1e-12


class TestChoi:
    def test_identity(self):
        c = chn.choi_matrix(chn.identity_channel(2)).matrix
        np.testing.assert_allclose(la.eigvalsh(c), [0, 0, 0, 2], atol=1e-13)
        omega = np.zeros(4)
        omega[[0, 3]] = 1
        np.testing.assert_allclose(c, np.outer(omega, omega), atol=1e-15)

    def test_depolarizing(self):
        c = chn.choi_matrix(chn.completely_depolarizing(3, 2))
        np.testing.assert_allclose(c.matrix, np.kron(np.eye(2) / 2, np.eye(3)), atol=1e-14)
        assert c.is_completely_positive()

    def test_transpose_map_is_not_cp(self):
        c = chn.transpose_map_choi(2)
        np.testing.assert_allclose(la.eigvalsh(c.matrix), [-1, 1, 1, 1], atol=1e-13)
        assert not c.is_completely_positive()

    def test_random_channels_are_cp_and_tp(self, rng):
        for _ in range(100):
            ch, _ = _random_pair(rng)
            c = chn.choi_matrix(ch)
            assert c.is_completely_positive()
            np.testing.assert_allclose(c.input_marginal(), np.eye(ch.dim_in), atol=1e-10)

    def test_kraus_non_uniqueness(self, rng):
        ch = chn.random_channel(2, 3, 2, rng)
        u = la.random_unitary(2, rng)
        mixed = [u[i, 0] * ch.kraus_ops[0] + u[i, 1] * ch.kraus_ops[1] for i in range(2)]
        assert chn.channels_equivalent(ch, chn.KrausChannel(mixed))


class TestStinespring:
    def test_identity(self):
        s = chn.stinespring(chn.identity_channel(3))
        assert s.multiplicity == 1
        np.testing.assert_allclose(s.isometry, np.eye(3))

    def test_random_reconstruction(self, rng):
        for _ in range(200):
            ch, rho = _random_pair(rng)
            s = chn.stinespring(ch)
            assert s.isometry_defect() <= 1e-10
            for _ in range(5):
                b = la.random_complex((ch.dim_out, ch.dim_out), rng)
                assert np.abs(s.dual_apply(b) - chn.dual(ch)(b)).max() <= 1e-10
            np.testing.assert_allclose(s.channel_apply(rho.matrix), chn.apply(ch, rho.matrix), atol=1e-12)


class TestComposition:
    def test_compose_matches_sequential(self, rng):
        w = chn.random_channel(3, 2, 2, rng)
        d = chn.random_channel(2, 4, 3, rng)
        rho = st.random_density(3, rng).matrix
        np.testing.assert_allclose(chn.apply(chn.compose(d, w), rho), chn.apply(d, chn.apply(w, rho)),
                                   atol=1e-13)

    def test_tensor_with_identity_on_products(self, rng):
        d = chn.random_channel(2, 3, 2, rng)
        r, s = st.random_density(3, rng).matrix, st.random_density(2, rng).matrix
        np.testing.assert_allclose(chn.apply(chn.tensor_with_identity(d, 3), np.kron(r, s)),
                                   np.kron(r, chn.apply(d, s)), atol=1e-13)

    def test_tensor_with_trivial_factor(self, rng):
        d = chn.random_channel(2, 3, 2, rng)
        assert chn.channels_equivalent(chn.tensor_with_identity(d, 1), d)


class TestMeasurement:
    def test_projective_on_diagonal(self):
        p = [0.2, 0.5, 0.3]
        povm = [np.diag(np.eye(3)[i]) for i in range(3)]
        np.testing.assert_allclose(chn.apply(chn.measurement_channel(povm), np.diag(p)), np.diag(p), atol=1e-15)

    def test_trivial_povm(self, rng):
        out = chn.apply(chn.measurement_channel([np.eye(3) / 2, np.eye(3) / 2]), st.random_density(3, rng).matrix)
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-14)

    def test_output_is_diagonal_distribution(self, rng):
        povm = chn.random_povm(3, 4, rng)
        rho = st.random_density(3, rng).matrix
        out = chn.apply(chn.measurement_channel(povm), rho)
        np.testing.assert_allclose(np.diag(out), [np.trace(e @ rho) for e in povm], atol=1e-13)
        np.testing.assert_allclose(out - np.diag(np.diag(out)), 0, atol=1e-15)

    def test_random_povm_valid(self, rng):
        for k in range(2, 5):
            chn.validate_povm(chn.random_povm(4, k, rng))

    def test_rejects_bad_sum(self):
        with pytest.raises(InvalidPOVM, match="sum|identity"):
            chn.validate_povm([np.eye(2) / 2, np.eye(2) / 3])

    def test_rejects_non_psd(self):
        with pytest.raises(InvalidPOVM, match="PSD|positive|negative"):
            chn.validate_povm([np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])])


def test_classical_channel_matches_matrix_vector(rng):
    for _ in range(100):
        d_in, d_out = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        m = rng.dirichlet(np.ones(d_out), size=d_in).T
        p = rng.dirichlet(np.ones(d_in))
        out = chn.apply(chn.classical_channel(m), np.diag(p))
        np.testing.assert_allclose(np.diag(out).real, m @ p, atol=1e-12)
        np.testing.assert_allclose(out - np.diag(np.diag(out)), 0, atol=1e-12)
