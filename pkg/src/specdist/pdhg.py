"""First-order projection solver for ball-constrained linear maximization.

The dual metric programs in this package all share one shape:

    maximize   sum_b tr(C_b F_b)
    subject to ||F_b||      <= rho_b          (operator norm, per block)
               ||(L F)_e||  <= r_e            (operator norm, per image block)

over stacked Hermitian blocks ``F``, where ``L`` is a linear map into
Hermitian blocks (adjacent differences for the Wasserstein dual, commutators
for the spectral distance).  Both constraint families admit exact projections
by eigenvalue clipping, so a primal-dual hybrid-gradient iteration applies
directly.

Every solve is certified from both sides without trusting the iteration:

* any iterate, scaled into the feasible set, gives a lower bound through the
  objective pairing;
* any dual variable Y gives the upper bound
  ``sum_b rho_b ||(C - L* Y)_b||_* + sum_e r_e ||Y_e||_*``
  by weak duality (Hoelder on each block).

The iteration stops when the certified relative gap reaches the requested
tolerance, which makes the reported value trustworthy independent of step
sizes and iteration counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg


@dataclass(frozen=True)
class SolverOptions:
    """Iteration controls shared by all first-order solves.

    ``tolerance`` bounds the certified relative duality gap at which a solve
    is declared converged.  ``gap_tolerance`` overrides it when a looser
    certification is acceptable (e.g. benchmark reproduction at 1e-3).  Step
    sizes default to 0.999 / ||L|| each, keeping tau * sigma * ||L||^2 < 1.
    """

    max_iterations: int = 200_000
    tolerance: float = 1e-6
    gap_tolerance: float | None = None
    primal_step: float | None = None
    dual_step: float | None = None
    check_every: int = 50

    def __post_init__(self):
        if self.max_iterations <= 0 or self.tolerance <= 0 or self.check_every <= 0:
            raise ValueError("solver options must be positive")
        for step in (self.gap_tolerance, self.primal_step, self.dual_step):
            if step is not None and step <= 0:
                raise ValueError("solver options must be positive")

    @property
    def gap_target(self) -> float:
        return self.gap_tolerance if self.gap_tolerance is not None else self.tolerance


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before certification.

    ``solution`` holds the best certified result available at abort; its type
    depends on the solver that raised (ball-program solution, transport
    solution, or None when no useful iterate exists).
    """

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True)
class BallProgram:
    """Data of one ball-constrained linear maximization (see module docstring)."""

    objective: np.ndarray          # (B, n, n) Hermitian blocks C
    ball_radii: np.ndarray         # (B,) operator-norm radii for F
    forward: Callable[[np.ndarray], np.ndarray]   # F (B,n,n) -> (E,n,n)
    adjoint: Callable[[np.ndarray], np.ndarray]   # Y (E,n,n) -> (B,n,n)
    image_radii: np.ndarray        # (E,) operator-norm radii for L F
    map_norm: float                # upper bound on ||L||


@dataclass(frozen=True)
class BallSolution:
    witness: np.ndarray            # feasible blocks achieving ``value``
    value: float                   # tr pairing of witness with the objective
    upper_bound: float             # certified bound on the true supremum
    feasibility_residual: float    # measured constraint violation of witness
    iterations: int

    @property
    def gap(self) -> float:
        return self.upper_bound - self.value


def _feasibility_scale(F, LF, ball_radii, image_radii) -> float:
    """Smallest s >= 1 such that F / s satisfies every ball constraint."""
    s = float((linalg.hermitian_op_norms(F) / ball_radii).max(initial=0.0))
    if LF.shape[0]:
        s = max(s, float((linalg.hermitian_op_norms(LF) / image_radii).max()))
    return max(1.0, s)


def _upper_bound(program: BallProgram, Y: np.ndarray) -> float:
    slack = program.objective - (program.adjoint(Y) if Y.shape[0] else 0.0)
    bound = float((program.ball_radii * linalg.hermitian_nuclear_norms(slack)).sum())
    if Y.shape[0]:
        bound += float((program.image_radii * linalg.hermitian_nuclear_norms(Y)).sum())
    return bound


def _residual(F, LF, ball_radii, image_radii) -> float:
    res = float((linalg.hermitian_op_norms(F) - ball_radii).max(initial=0.0))
    if LF.shape[0]:
        res = max(res, float((linalg.hermitian_op_norms(LF) - image_radii).max()))
    return max(0.0, res)


def solve_ball_program(program: BallProgram, options: SolverOptions) -> BallSolution:
    C = np.asarray(program.objective, dtype=complex)
    rho = np.asarray(program.ball_radii, dtype=float)
    r = np.asarray(program.image_radii, dtype=float)
    E = r.shape[0]

    trivial = float((rho * linalg.hermitian_nuclear_norms(C)).sum())
    if trivial == 0.0:
        zero = np.zeros_like(C)
        return BallSolution(zero, 0.0, 0.0, 0.0, 0)

    if E == 0:
        # no image constraints: the dual-norm pairing is attained in closed
        # form by the spectral sign of each objective block
        F = rho[:, None, None] * linalg.spectral_sign(C)
        value = linalg.trace_pairing(F, C)
        res = _residual(F, program.forward(F), rho, r)
        return BallSolution(F, value, value, res, 0)

    tau = options.primal_step or 0.999 / program.map_norm
    sigma = options.dual_step or 0.999 / program.map_norm
    gap_tol = options.gap_target
    floor = 0.01 * trivial

    F = np.zeros_like(C)
    Fbar = F.copy()
    Y = np.zeros((E,) + C.shape[1:], dtype=complex)

    best_value = 0.0
    best_witness = F.copy()
    best_upper = trivial

    def certified(it: int) -> BallSolution | None:
        nonlocal best_value, best_witness, best_upper
        LF = program.forward(F)
        scale = _feasibility_scale(F, LF, rho, r)
        value = linalg.trace_pairing(F, C) / scale
        if value > best_value:
            best_value = value
            best_witness = F / scale
        best_upper = min(best_upper, _upper_bound(program, Y))
        if best_upper - best_value <= gap_tol * max(abs(best_upper), abs(best_value), floor):
            witness = best_witness
            res = _residual(witness, program.forward(witness), rho, r)
            return BallSolution(
                witness, linalg.trace_pairing(witness, C), best_upper, res, it
            )
        return None

    for it in range(1, options.max_iterations + 1):
        W = Y + sigma * program.forward(Fbar)
        Y = W - sigma * linalg.clip_eigenvalues(W / sigma, r)
        F_new = linalg.clip_eigenvalues(F - tau * program.adjoint(Y) + tau * C, rho)
        Fbar = 2.0 * F_new - F
        F = F_new
        if it % options.check_every == 0:
            done = certified(it)
            if done is not None:
                return done

    done = certified(options.max_iterations)
    if done is not None:
        return done
    res = _residual(best_witness, program.forward(best_witness), rho, r)
    best = BallSolution(
        best_witness,
        best_value,
        best_upper,
        res,
        options.max_iterations,
    )
    raise ConvergenceError(
        f"no certificate at relative gap {gap_tol:.1e} within "
        f"{options.max_iterations} iterations (reached "
        f"{best.gap / max(abs(best_upper), abs(best_value), floor):.2e})",
        best,
    )
