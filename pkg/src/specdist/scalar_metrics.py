"""Classical scalar metrics: total variation, Kolmogorov, 1-Wasserstein.

The balanced Wasserstein distance uses the closed CDF-area form; the
unbalanced variant (Lipschitz + box-constrained test functions) is solved
exactly as a small LP.  On a 1-d grid with ground distance |x - y| the
Lipschitz constraints between adjacent points imply all pairwise ones
(telescoping), so the production LP carries O(K) constraints; the all-pairs
formulation is kept as a test oracle for that reduction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import Grid, MatrixMeasure, _check_compatible
from .simplex import LpProblem, lp_simplex


@dataclass(frozen=True)
class CdfTable:
    """Right-closed cumulative sums F_k = sum_{j<=k} mass_j."""

    grid: Grid
    values: np.ndarray


def cdf_table(mu: MatrixMeasure) -> CdfTable:
    return CdfTable(mu.grid, np.cumsum(mu.scalar_values()))


def _scalar_pair(mu1: MatrixMeasure, mu2: MatrixMeasure):
    _check_compatible(mu1, mu2)
    return mu1.scalar_values(), mu2.scalar_values()


def tv_scalar(mu1: MatrixMeasure, mu2: MatrixMeasure) -> float:
    """Total variation: sum of |mass differences|."""
    m1, m2 = _scalar_pair(mu1, mu2)
    return float(np.abs(m1 - m2).sum())


def kolmogorov(mu1: MatrixMeasure, mu2: MatrixMeasure) -> float:
    """Largest absolute CDF difference over the grid."""
    m1, m2 = _scalar_pair(mu1, mu2)
    return float(np.abs(np.cumsum(m1) - np.cumsum(m2)).max())


def w1_balanced(mu1: MatrixMeasure, mu2: MatrixMeasure) -> float:
    """Balanced 1-Wasserstein distance via the CDF area formula.

    Requires equal total masses; unbalanced inputs should go through
    ``w1_kappa_scalar`` instead.
    """
    m1, m2 = _scalar_pair(mu1, mu2)
    scale = max(float(m1.max(initial=0.0)), float(m2.max(initial=0.0)), 1e-300)
    if abs(m1.sum() - m2.sum()) > 1e-9 * scale:
        raise ValueError(
            "total masses differ; the balanced W1 is undefined "
            "(use w1_kappa_scalar for unbalanced measures)"
        )
    F1 = np.cumsum(m1)
    F2 = np.cumsum(m2)
    gaps = mu1.grid.spacings
    return float(np.abs(F1[:-1] - F2[:-1]) @ gaps)


def _w1_kappa_lp(points: np.ndarray, delta: np.ndarray, kappa: float,
                 all_pairs: bool) -> LpProblem:
    K = points.size
    rows = []
    bounds = []
    if all_pairs:
        index_pairs = [(i, j) for i in range(K) for j in range(i + 1, K)]
    else:
        index_pairs = [(k, k + 1) for k in range(K - 1)]
    for i, j in index_pairs:
        row = np.zeros(K)
        row[i], row[j] = 1.0, -1.0
        gap = abs(points[j] - points[i])
        rows.extend([row, -row])
        bounds.extend([gap, gap])
    eye = np.eye(K)
    for k in range(K):
        rows.extend([eye[k], -eye[k]])
        bounds.extend([kappa, kappa])
    return LpProblem(delta, np.array(rows), np.array(bounds))


def w1_kappa_scalar(mu1: MatrixMeasure, mu2: MatrixMeasure, kappa: float) -> float:
    """Unbalanced scalar Wasserstein-like distance with TV weight ``kappa``.

    Maximizes ``sum_k f_k (m1_k - m2_k)`` over test functions with unit
    Lipschitz bound and ``|f| <= kappa``, solved exactly as an LP with
    adjacent-difference constraints only.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    m1, m2 = _scalar_pair(mu1, mu2)
    delta = m1 - m2
    if not delta.any():
        return 0.0
    value, _ = lp_simplex(_w1_kappa_lp(mu1.grid.points, delta, kappa, all_pairs=False))
    return value


def w1_kappa_scalar_all_pairs(mu1: MatrixMeasure, mu2: MatrixMeasure,
                              kappa: float) -> float:
    """All-pairs-constraint variant of ``w1_kappa_scalar`` (test oracle)."""
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    m1, m2 = _scalar_pair(mu1, mu2)
    value, _ = lp_simplex(_w1_kappa_lp(mu1.grid.points, m1 - m2, kappa, all_pairs=True))
    return value
