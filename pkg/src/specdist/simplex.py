"""Dense two-phase simplex for small linear programs.

Solves ``max c.x  subject to  A x <= b`` with free variables, which is the
shape every LP in this package reduces to (Lipschitz/box duals, transport
oracles).  Free variables are split into positive parts, slacks turn the
inequalities into equalities, and phase 1 runs with artificial variables.
Bland's rule guarantees termination; adequate up to a few hundred variables,
which is all the test oracles need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9


class LpInfeasibleError(ValueError):
    """The constraint set A x <= b is empty."""


class LpUnboundedError(ValueError):
    """The objective is unbounded above on the feasible set."""


@dataclass(frozen=True)
class LpProblem:
    """max objective . x  subject to  constraints @ x <= bounds (x free)."""

    objective: np.ndarray
    constraints: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        A = np.atleast_2d(np.asarray(self.constraints, dtype=float))
        b = np.atleast_1d(np.asarray(self.bounds, dtype=float))
        if A.shape != (b.size, c.size):
            raise ValueError(
                f"inconsistent LP shapes: A {A.shape}, b {b.shape}, c {c.shape}"
            )
        if not (np.isfinite(c).all() and np.isfinite(A).all() and np.isfinite(b).all()):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", A)
        object.__setattr__(self, "bounds", b)


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _run(T: np.ndarray, basis: np.ndarray, costs: np.ndarray, tol: float):
    """Minimize costs over the tableau in place (Bland's rule)."""
    m = T.shape[0] - 1
    T[m, :] = 0.0
    T[m, :-1] = costs
    for i in range(m):
        cb = costs[basis[i]]
        if cb != 0.0:
            T[m] -= cb * T[i]
    while True:
        reduced = T[m, :-1]
        entering = -1
        for j in range(reduced.size):
            if reduced[j] < -tol:
                entering = j
                break
        if entering < 0:
            return
        col = T[:m, entering]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            raise LpUnboundedError("objective unbounded above on the feasible set")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        near = rows[ratios <= best + tol * max(1.0, abs(best))]
        leaving = int(near[np.argmin(basis[near])])
        _pivot(T, basis, leaving, entering)


def lp_simplex(problem: LpProblem) -> tuple[float, np.ndarray]:
    """Optimal value and a vertex solution of ``max c.x, A x <= b``.

    Raises ``LpInfeasibleError`` / ``LpUnboundedError`` for the degenerate
    outcomes, distinctly.
    """
    c, A, b = problem.objective, problem.constraints, problem.bounds
    m, n = A.shape

    # standard form: [A, -A, I] (u, v, s) = b with u, v, s >= 0
    full = np.hstack([A, -A, np.eye(m)])
    rhs = b.copy()
    neg = rhs < 0
    full[neg] *= -1.0
    rhs[neg] *= -1.0
    n_real = 2 * n + m

    # phase 1: artificials form the initial basis
    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = full
    T[:m, n_real : n_real + m] = np.eye(m)
    T[:m, -1] = rhs
    basis = np.arange(n_real, n_real + m)
    phase1 = np.zeros(n_real + m)
    phase1[n_real:] = 1.0
    _run(T, basis, phase1, PIVOT_TOL)
    if -T[m, -1] > PIVOT_TOL * max(1.0, float(np.abs(rhs).max(initial=0.0))):
        raise LpInfeasibleError("constraints A x <= b admit no solution")

    # drive leftover artificials out of the basis (or drop redundant rows)
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n_real:
            row = T[i, :n_real]
            cols = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
            if cols.size:
                _pivot(T, basis, i, int(cols[0]))
            else:
                keep[i] = False
    if not keep.all():
        T = np.vstack([T[:m][keep], T[m]])
        basis = basis[keep]
        m = int(keep.sum())

    # phase 2 on the real columns
    T = np.hstack([T[:, :n_real], T[:, -1:]])
    phase2 = np.concatenate([-c, c, np.zeros(T.shape[1] - 1 - 2 * n)])
    _run(T, basis, phase2, PIVOT_TOL)

    x = np.zeros(n_real)
    for i in range(m):
        x[basis[i]] = T[i, -1]
    solution = x[:n] - x[n : 2 * n]
    return float(c @ solution), solution
