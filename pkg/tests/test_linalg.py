import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specdist import (
    as_hermitian,
    commutator,
    eig_soft_threshold,
    eigh,
    nuclear_norm,
    op_norm,
    project_opnorm_ball,
)
from specdist import linalg

from conftest import random_hermitian


def _rng(seed):
    return np.random.default_rng(seed)


class TestEigh:
    def test_identity(self):
        lam, V = eigh(np.eye(2, dtype=complex))
        assert np.allclose(lam, [1.0, 1.0])
        assert np.allclose(V @ V.conj().T, np.eye(2))

    def test_flip(self):
        lam, _ = eigh(np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(lam, [-1.0, 1.0])

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_reconstruction(self, rng, n):
        H = random_hermitian(rng, n, scale=3.0)
        lam, V = eigh(H)
        scale = max(1.0, op_norm(H))
        assert np.abs((V * lam) @ V.conj().T - H).max() <= 1e-10 * scale
        assert np.abs(V @ V.conj().T - np.eye(n)).max() <= 1e-10
        assert np.all(np.diff(lam) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestNorms:
    def test_op_norm_permutation(self):
        assert op_norm(np.array([[0, 1], [1, 0]])) == pytest.approx(1.0)

    def test_op_norm_diagonal(self):
        assert op_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)

    def test_nuclear_diagonal(self):
        assert nuclear_norm(np.diag([3.0, -4.0])) == pytest.approx(7.0)

    def test_nuclear_identity(self):
        assert nuclear_norm(np.eye(2)) == pytest.approx(2.0)

    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_op_norm_gram_oracle(self, seed):
        rng = _rng(seed)
        M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        gram = np.linalg.eigvalsh(M.conj().T @ M)
        assert op_norm(M) == pytest.approx(np.sqrt(gram[-1]), abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_nuclear_gram_oracle(self, seed):
        rng = _rng(seed)
        M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        gram = np.linalg.eigvalsh(M.conj().T @ M)
        assert nuclear_norm(M) == pytest.approx(np.sqrt(np.maximum(gram, 0)).sum(), abs=1e-9)

    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_hermitian_norms_are_eigenvalue_sums(self, seed):
        rng = _rng(seed)
        H = random_hermitian(rng, 3, scale=2.0)
        lam = np.linalg.eigvalsh(H)
        assert nuclear_norm(H) == pytest.approx(np.abs(lam).sum(), abs=1e-10)
        assert op_norm(H) == pytest.approx(np.abs(lam).max(), abs=1e-10)

    @given(st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_pairing_bound(self, seed):
        rng = _rng(seed)
        F = random_hermitian(rng, 3)
        delta = random_hermitian(rng, 3)
        pairing = abs(np.trace(F @ delta).real)
        assert pairing <= op_norm(F) * nuclear_norm(delta) + 1e-10


class TestProjectOpnormBall:
    def test_interior_point_unchanged(self, rng):
        H = random_hermitian(rng, 3)
        H = 0.5 * H / op_norm(H)
        assert np.array_equal(project_opnorm_ball(H, 1.0), H)

    def test_diagonal_clipping(self):
        P = project_opnorm_ball(np.diag([3.0, -4.0]).astype(complex), 1.0)
        assert np.allclose(P, np.diag([1.0, -1.0]))

    def test_random_feasible_point_optimality(self, rng):
        H = random_hermitian(rng, 3, scale=3.0)
        P = project_opnorm_ball(H, 1.0)
        dist = np.linalg.norm(H - P)
        for _ in range(100):
            Q = random_hermitian(rng, 3, scale=2.0)
            if op_norm(Q) > 1.0:
                Q = project_opnorm_ball(Q, 1.0)
            assert dist <= np.linalg.norm(H - Q) + 1e-12

    @given(st.integers(0, 10**6))
    @settings(max_examples=30, deadline=None)
    def test_idempotent_and_nonexpansive(self, seed):
        rng = _rng(seed)
        H1 = random_hermitian(rng, 3, scale=2.0)
        H2 = random_hermitian(rng, 3, scale=2.0)
        P1 = project_opnorm_ball(H1, 1.0)
        P2 = project_opnorm_ball(H2, 1.0)
        assert np.abs(project_opnorm_ball(P1, 1.0) - P1).max() <= 1e-12
        assert np.linalg.norm(P1 - P2) <= np.linalg.norm(H1 - H2) + 1e-12

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError, match="radius"):
            project_opnorm_ball(np.eye(2, dtype=complex), 0.0)


class TestEigSoftThreshold:
    def test_diagonal(self):
        S = eig_soft_threshold(np.diag([3.0, -4.0]).astype(complex), 1.0)
        assert np.allclose(S, np.diag([2.0, -3.0]))

    def test_full_shrinkage(self, rng):
        H = random_hermitian(rng, 3)
        assert np.abs(eig_soft_threshold(H, op_norm(H) + 0.1)).max() <= 1e-12

    def test_zero_threshold_exact(self, rng):
        H = random_hermitian(rng, 4)
        assert np.array_equal(eig_soft_threshold(H, 0.0), H)

    def test_prox_optimality_probe(self, rng):
        H = random_hermitian(rng, 3, scale=2.0)
        tau = 0.7
        P = eig_soft_threshold(H, tau)

        def prox_objective(X):
            return 0.5 * np.linalg.norm(H - X) ** 2 + tau * nuclear_norm(X)

        base = prox_objective(P)
        for _ in range(100):
            assert base <= prox_objective(P + 0.1 * random_hermitian(rng, 3)) + 1e-12

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValueError, match="nonnegative"):
            eig_soft_threshold(np.eye(2, dtype=complex), -0.1)


class TestCommutator:
    def test_off_diagonal_pattern(self):
        D = np.array([[0, 1], [1, 0]], dtype=complex)
        F = np.diag([2.0, 5.0]).astype(complex)
        C = commutator(D, F)
        assert np.allclose(C, [[0, 5.0 - 2.0], [2.0 - 5.0, 0]])

    def test_identity_commutes(self, rng):
        D = random_hermitian(rng, 3)
        assert np.abs(commutator(D, np.eye(3, dtype=complex))).max() == 0.0

    @given(st.integers(0, 10**6))
    @settings(max_examples=30, deadline=None)
    def test_anti_hermitian(self, seed):
        rng = _rng(seed)
        C = commutator(random_hermitian(rng, 3), random_hermitian(rng, 3))
        assert np.abs(C + C.conj().T).max() <= 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            commutator(np.eye(2, dtype=complex), np.eye(3, dtype=complex))


class TestBatchedTransforms:
    """The closed-form n <= 2 paths must agree with the eigh-based route."""

    def _reference_clip(self, M, r):
        lam, V = np.linalg.eigh(M)
        lam = np.clip(lam, -np.asarray(r)[..., None], np.asarray(r)[..., None])
        return np.einsum("...ij,...j,...kj->...ik", V, lam, V.conj())

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_clip_matches_eigh(self, rng, n):
        M = np.array([random_hermitian(rng, n, 2.0) for _ in range(40)])
        r = rng.uniform(0.1, 2.0, size=40)
        assert np.abs(
            linalg.clip_eigenvalues(M, r) - self._reference_clip(M, r)
        ).max() <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_soft_threshold_matches_single(self, rng, n):
        M = np.array([random_hermitian(rng, n, 2.0) for _ in range(20)])
        tau = rng.uniform(0.0, 1.5, size=20)
        batched = linalg.soft_threshold_eigenvalues(M, tau)
        for k in range(20):
            assert np.abs(batched[k] - eig_soft_threshold(M[k], tau[k])).max() <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_norm_batches(self, rng, n):
        M = np.array([random_hermitian(rng, n, 2.0) for _ in range(25)])
        assert np.allclose(
            linalg.hermitian_op_norms(M), [op_norm(m) for m in M], atol=1e-11
        )
        assert np.allclose(
            linalg.hermitian_nuclear_norms(M), [nuclear_norm(m) for m in M], atol=1e-11
        )

    def test_degenerate_identity_blocks(self):
        M = np.einsum("k,ij->kij", np.array([1.5, -2.0, 0.0]), np.eye(2)).astype(complex)
        clipped = linalg.clip_eigenvalues(M, 1.0)
        assert np.allclose(clipped[0], np.eye(2))
        assert np.allclose(clipped[1], -np.eye(2))
        assert np.allclose(clipped[2], np.zeros((2, 2)))

    def test_positive_part(self, rng):
        H = random_hermitian(rng, 3, 2.0)
        pos = linalg.positive_part(H[None])[0]
        lam = np.linalg.eigvalsh(pos)
        assert lam.min() >= -1e-12
        # positive and negative parts act on orthogonal eigenspaces
        assert np.abs((pos - H) @ pos).max() <= 1e-10
        assert np.abs(pos - linalg.positive_part(pos[None])[0]).max() <= 1e-12

    def test_spectral_sign(self, rng):
        H = random_hermitian(rng, 2, 2.0)
        S = linalg.spectral_sign(H[None])[0]
        lam = np.linalg.eigvalsh(S)
        assert np.all(np.abs(np.abs(lam) - 1.0) <= 1e-12)
        assert np.trace(S @ H).real == pytest.approx(nuclear_norm(H), abs=1e-10)


def test_as_hermitian_repairs_small_drift(rng):
    H = random_hermitian(rng, 3)
    drift = H + 1e-14 * np.array([[0, 1j, 0], [0, 0, 0], [0, 0, 0]])
    repaired = as_hermitian(drift)
    assert np.abs(repaired - repaired.conj().T).max() == 0.0


def test_as_hermitian_rejects_large_violation():
    with pytest.raises(ValueError, match="not Hermitian"):
        as_hermitian(np.array([[0.0, 1.0], [0.5, 0.0]]))
