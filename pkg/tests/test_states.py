import math

import numpy as np
import pytest

from qdpi import linalg as la
from qdpi import states as st
from qdpi.errors import InvalidState, SingularReference


def _classical_kl(p, q):
    return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


class TestDensityOperator:
    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidState, match="trace"):
            st.DensityOperator(np.diag([0.5, 0.4]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidState, match="PSD|negative|eigenvalue"):
            st.DensityOperator(np.diag([1.5, -0.5]))

    def test_matrix_is_read_only(self):
        rho = st.maximally_mixed(2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_random_density_is_valid_and_seeded(self):
        a = st.random_density(4, np.random.default_rng(3))
        b = st.random_density(4, np.random.default_rng(3))
        np.testing.assert_array_equal(a.matrix, b.matrix)
        assert np.trace(a.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert la.is_psd(a.matrix)

    def test_dim_one(self):
        np.testing.assert_allclose(st.random_density(1, np.random.default_rng(0)).matrix, [[1.0]])


class TestSupport:
    def test_maximally_mixed(self):
        np.testing.assert_allclose(st.support_projector(st.maximally_mixed(3)), np.eye(3), atol=1e-12)

    def test_pure(self):
        np.testing.assert_allclose(st.support_projector(st.pure_state([1, 0])), np.diag([1, 0]), atol=1e-12)

    def test_partial(self):
        np.testing.assert_allclose(st.support_projector(np.diag([0.5, 0.5, 0.0])), np.diag([1, 1, 0]),
                                   atol=1e-12)


class TestEntropy:
    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_maximally_mixed(self, d):
        assert st.von_neumann_entropy(st.maximally_mixed(d)) == pytest.approx(math.log(d), abs=1e-12)

    def test_pure_is_zero(self, rng):
        v = la.random_complex(4, rng)
        assert st.von_neumann_entropy(st.pure_state(v / np.linalg.norm(v))) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value(self):
        assert st.von_neumann_entropy(np.diag([0.5, 0.25, 0.25])) == pytest.approx(1.0397207708399179, abs=1e-14)

    def test_bounds(self, rng):
        for _ in range(300):
            d = int(rng.integers(2, 6))
            h = st.von_neumann_entropy(st.random_density(d, rng))
            assert -1e-12 <= h <= math.log(d) + 1e-12


class TestRelativeEntropy:
    def test_self_is_zero(self, rng):
        rho = st.random_density(3, rng)
        assert st.relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)

    def test_classical_hand_value(self):
        assert st.relative_entropy(np.diag([1.0, 0.0]), np.diag([0.5, 0.5])) == pytest.approx(math.log(2), abs=1e-12)

    def test_disjoint_supports_are_infinite(self):
        assert st.relative_entropy(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == math.inf

    def test_supported_on_singular_reference_is_finite(self):
        a = np.diag([0.3, 0.7, 0.0])
        b = np.diag([0.5, 0.4, 0.1])
        assert st.relative_entropy(a, np.diag([0.5, 0.5, 0.0])) == pytest.approx(
            _classical_kl([0.3, 0.7], [0.5, 0.5]), abs=1e-12)
        assert math.isfinite(st.relative_entropy(a, b))
        assert st.relative_entropy(b, np.diag([0.5, 0.5, 0.0])) == math.inf

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_nonnegative(self, d, rng):
        worst = min(st.relative_entropy(st.random_density(d, rng), st.random_density(d, rng))
                    for _ in range(1000))
        assert worst >= -la.TOL_PSD

    def test_commuting_reduction(self, rng):
        for _ in range(200):
            d = int(rng.integers(2, 6))
            p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
            assert st.relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(_classical_kl(p, q), abs=1e-10)

    def test_unitary_invariance(self, rng):
        for _ in range(200):
            d = int(rng.integers(2, 5))
            a, b = st.random_density(d, rng).matrix, st.random_density(d, rng).matrix
            u = la.random_unitary(d, rng)
            rot = st.relative_entropy(u @ a @ u.conj().T, u @ b @ u.conj().T)
            assert rot == pytest.approx(st.relative_entropy(a, b), abs=1e-9)

    def test_matches_numpy_log_oracle(self, rng):
        a, b = st.random_density(3, rng).matrix, st.random_density(3, rng).matrix

        def logm(m):
            lam, u = np.linalg.eigh(m)
            return u @ np.diag(np.log(lam)) @ u.conj().T

        oracle = np.trace(a @ (logm(a) - logm(b))).real
        assert st.relative_entropy(a, b) == pytest.approx(oracle, abs=1e-10)


class TestDerivativeLimit:
    def test_equal_states(self, rng):
        rho = st.random_density(3, rng)
        assert st.relative_entropy_via_limit(rho, rho) == pytest.approx(0.0, abs=1e-8)

    def test_smoothed_classical(self):
        eps = 1e-6
        a = np.diag([1 - eps, eps])
        got = st.relative_entropy_via_limit(a, np.diag([0.5, 0.5]))
        assert got == pytest.approx(math.log(2), abs=1e-4)

    def test_matches_direct(self, rng):
        worst = 0.0
        for _ in range(200):
            d = int(rng.integers(2, 5))
            a, b = st.random_density(d, rng), st.random_density(d, rng)
            worst = max(worst, abs(st.relative_entropy_via_limit(a, b) - st.relative_entropy(a, b)))
        assert worst <= 1e-5

    def test_richardson_beats_plain_difference(self, rng):
        a, b = st.random_density(3, rng), st.random_density(3, rng)
        exact = st.relative_entropy(a, b)
        plain = abs(st.relative_entropy_via_limit(a, b, richardson=False) - exact)
        rich = abs(st.relative_entropy_via_limit(a, b) - exact)
        assert rich < plain

    def test_singular_reference(self):
        with pytest.raises(SingularReference):
            st.relative_entropy_via_limit(np.diag([0.5, 0.5]), np.diag([1.0, 0.0]))
