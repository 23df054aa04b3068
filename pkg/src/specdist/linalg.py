"""Dense Hermitian/complex matrix kernels.

Everything downstream (measures, metrics, solvers) is built on the small set
of spectral operations in this module: eigendecomposition, operator/nuclear
norms, projection onto operator-norm balls and the eigenvalue soft-threshold
(the proximal operator of the nuclear norm on Hermitian matrices).

All functions accept plain complex ndarrays.  Batched variants operate on
stacks of Hermitian blocks with shape ``(..., n, n)`` and use a closed-form
eigendecomposition for ``n <= 2``, which is the hot path of the solvers.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-12


def hermitian_part(M: np.ndarray) -> np.ndarray:
    """Return (M + M*)/2 for stacked square blocks."""
    return 0.5 * (M + np.conj(np.swapaxes(M, -1, -2)))


def hermiticity_violation(M: np.ndarray) -> float:
    """Max |M - M*| relative to the largest absolute entry (0 for M = 0)."""
    M = np.asarray(M)
    scale = float(np.abs(M).max(initial=0.0))
    if scale == 0.0:
        return 0.0
    viol = float(np.abs(M - np.conj(np.swapaxes(M, -1, -2))).max())
    return viol / scale


def as_hermitian(M, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate and symmetrize a (stack of) Hermitian matrix.

    Violations below ``tol`` (relative to the largest absolute entry) are
    repaired by symmetrization, which keeps solver iterates exactly Hermitian
    despite floating-point drift; anything larger raises ``ValueError``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"expected square matrix blocks, got shape {M.shape}")
    viol = hermiticity_violation(M)
    if viol > tol:
        raise ValueError(
            f"matrix is not Hermitian: relative violation {viol:.3e} exceeds {tol:.1e}"
        )
    return hermitian_part(M)


def eigh(H: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    ``H = V diag(lam) V*``.  Rejects inputs whose hermiticity violation
    exceeds ``tol``.
    """
    H = as_hermitian(H, tol)
    lam, V = np.linalg.eigh(H)
    return lam, V


def op_norm(M: np.ndarray) -> float:
    """Largest singular value of a complex matrix."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a single matrix, got shape {M.shape}")
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[0])


def nuclear_norm(M: np.ndarray) -> float:
    """Sum of singular values of a complex matrix."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a single matrix, got shape {M.shape}")
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False).sum())


def commutator(D: np.ndarray, F: np.ndarray) -> np.ndarray:
    """[D, F] = DF - FD.  Anti-Hermitian whenever both inputs are Hermitian."""
    D = np.asarray(D, dtype=complex)
    F = np.asarray(F, dtype=complex)
    if D.shape != F.shape or D.ndim < 2 or D.shape[-1] != D.shape[-2]:
        raise ValueError(f"incompatible shapes for commutator: {D.shape} vs {F.shape}")
    return D @ F - F @ D


def project_opnorm_ball(H: np.ndarray, r: float) -> np.ndarray:
    """Frobenius-nearest Hermitian matrix with operator norm <= r.

    Realized by clipping eigenvalues to [-r, r]; returns the input unchanged
    when it is already inside the ball.
    """
    if r <= 0:
        raise ValueError(f"ball radius must be positive, got {r}")
    H = as_hermitian(H)
    lam, V = np.linalg.eigh(H)
    if np.abs(lam).max(initial=0.0) <= r:
        return H
    lam = np.clip(lam, -r, r)
    return (V * lam) @ np.conj(V.T)


def eig_soft_threshold(H: np.ndarray, tau: float) -> np.ndarray:
    """Shrink the eigenvalues of a Hermitian matrix toward 0 by ``tau``.

    This is the proximal operator of ``tau * nuclear_norm`` restricted to
    Hermitian matrices; eigenvectors are preserved.
    """
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    H = as_hermitian(H)
    if tau == 0:
        return H
    lam, V = np.linalg.eigh(H)
    lam = np.sign(lam) * np.maximum(np.abs(lam) - tau, 0.0)
    return (V * lam) @ np.conj(V.T)


# ---------------------------------------------------------------------------
# batched spectral transforms on stacks of Hermitian blocks (..., n, n)
# ---------------------------------------------------------------------------

def _eig2(M: np.ndarray):
    """Closed-form eigenvalues (lo, hi) of stacked 2x2 Hermitian blocks."""
    a = M[..., 0, 0].real
    d = M[..., 1, 1].real
    b = M[..., 0, 1]
    m = 0.5 * (a + d)
    s = np.sqrt(0.25 * (a - d) ** 2 + b.real**2 + b.imag**2)
    return m - s, m + s


def _spectral_map2(M: np.ndarray, f_lo: np.ndarray, f_hi: np.ndarray) -> np.ndarray:
    """Apply an eigenvalue map to 2x2 Hermitian blocks given mapped extremes.

    With M = m I + (M - m I) and spectral gap 2s, the mapped matrix is
    c0 I + c1 (M - m I) where c0 = (f_hi + f_lo)/2, c1 = (f_hi - f_lo)/(2s).
    The s = 0 (scalar multiple of I) case degenerates to c0 I.
    """
    a = M[..., 0, 0].real
    d = M[..., 1, 1].real
    b = M[..., 0, 1]
    m = 0.5 * (a + d)
    s = np.sqrt(0.25 * (a - d) ** 2 + b.real**2 + b.imag**2)
    c0 = 0.5 * (f_hi + f_lo)
    c1 = np.where(s > 0, (f_hi - f_lo) / (2.0 * np.where(s > 0, s, 1.0)), 0.0)
    out = c1[..., None, None] * M
    shift = c0 - c1 * m
    out[..., 0, 0] += shift
    out[..., 1, 1] += shift
    return out


def clip_eigenvalues(M: np.ndarray, radius) -> np.ndarray:
    """Project stacked Hermitian blocks onto operator-norm balls.

    ``radius`` broadcasts against the batch shape ``M.shape[:-2]``.
    """
    M = np.asarray(M)
    n = M.shape[-1]
    r = np.broadcast_to(np.asarray(radius, dtype=float), M.shape[:-2])
    if n == 1:
        return np.clip(M.real, -r[..., None, None], r[..., None, None]).astype(complex)
    if n == 2:
        lo, hi = _eig2(M)
        return _spectral_map2(M, np.clip(lo, -r, r), np.clip(hi, -r, r))
    lam, V = np.linalg.eigh(M)
    lam = np.clip(lam, -r[..., None], r[..., None])
    return np.einsum("...ij,...j,...kj->...ik", V, lam, V.conj())


def soft_threshold_eigenvalues(M: np.ndarray, tau) -> np.ndarray:
    """Eigenvalue soft-threshold of stacked Hermitian blocks (batched prox)."""
    M = np.asarray(M)
    n = M.shape[-1]
    t = np.broadcast_to(np.asarray(tau, dtype=float), M.shape[:-2])

    def shrink(lam, thresh):
        return np.sign(lam) * np.maximum(np.abs(lam) - thresh, 0.0)

    if n == 1:
        return shrink(M.real, t[..., None, None]).astype(complex)
    if n == 2:
        lo, hi = _eig2(M)
        return _spectral_map2(M, shrink(lo, t), shrink(hi, t))
    lam, V = np.linalg.eigh(M)
    lam = shrink(lam, t[..., None])
    return np.einsum("...ij,...j,...kj->...ik", V, lam, V.conj())


def spectral_sign(M: np.ndarray) -> np.ndarray:
    """Blockwise spectral sign: eigenvalues mapped to {-1, 0, +1}."""
    M = np.asarray(M)
    n = M.shape[-1]
    if n == 1:
        return np.sign(M.real).astype(complex)
    if n == 2:
        lo, hi = _eig2(M)
        return _spectral_map2(M, np.sign(lo), np.sign(hi))
    lam, V = np.linalg.eigh(M)
    return np.einsum("...ij,...j,...kj->...ik", V, np.sign(lam), V.conj())


def hermitian_op_norms(M: np.ndarray) -> np.ndarray:
    """Batched operator norms (max |eigenvalue|) of Hermitian blocks."""
    M = np.asarray(M)
    n = M.shape[-1]
    if n == 1:
        return np.abs(M[..., 0, 0].real)
    if n == 2:
        lo, hi = _eig2(M)
        return np.maximum(np.abs(lo), np.abs(hi))
    return np.abs(np.linalg.eigvalsh(M)).max(axis=-1)


def hermitian_nuclear_norms(M: np.ndarray) -> np.ndarray:
    """Batched nuclear norms (sum of |eigenvalue|) of Hermitian blocks."""
    M = np.asarray(M)
    n = M.shape[-1]
    if n == 1:
        return np.abs(M[..., 0, 0].real)
    if n == 2:
        lo, hi = _eig2(M)
        return np.abs(lo) + np.abs(hi)
    return np.abs(np.linalg.eigvalsh(M)).sum(axis=-1)


def min_eigenvalues(M: np.ndarray) -> np.ndarray:
    """Batched smallest eigenvalues of Hermitian blocks."""
    M = np.asarray(M)
    n = M.shape[-1]
    if n == 1:
        return M[..., 0, 0].real.copy()
    if n == 2:
        lo, _ = _eig2(M)
        return lo
    return np.linalg.eigvalsh(M)[..., 0]


def positive_part(M: np.ndarray) -> np.ndarray:
    """Blockwise projection onto the PSD cone (negative eigenvalues to 0)."""
    M = np.asarray(M)
    n = M.shape[-1]
    if n == 1:
        return np.maximum(M.real, 0.0).astype(complex)
    if n == 2:
        lo, hi = _eig2(M)
        return _spectral_map2(M, np.maximum(lo, 0.0), np.maximum(hi, 0.0))
    lam, V = np.linalg.eigh(M)
    return np.einsum("...ij,...j,...kj->...ik", V, np.maximum(lam, 0.0), V.conj())


def trace_pairing(F: np.ndarray, G: np.ndarray) -> float:
    """Sum over blocks of tr(F_k G_k); real for Hermitian stacks."""
    return float(np.einsum("...ij,...ji->...", F, G).sum().real)
