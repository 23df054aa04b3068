"""Spectral distance between density matrices with fixed Dirac operators.

For states rho1, rho2 (PSD, unit trace) and Hermitian Dirac operators D_i,
the distance is

    sup { |tr((rho1 - rho2) f)| : ||[D_i, f]|| <= 1 for all i, ||f|| <= kappa }

over Hermitian f.  The commutator plays the role of a derivative; without
the ``kappa`` bound the supremum can genuinely diverge (already for 2x2
states differing in their off-diagonal entries), so the unbounded case is
detected by a doubling probe rather than solved directly.

The constraint images are anti-Hermitian; multiplying by -i makes them
Hermitian with the same operator norm, which puts the problem in the shape
of :mod:`specdist.pdhg` (eigenvalue-clipping projections throughout).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .measures import _readonly
from .pdhg import BallProgram, ConvergenceError, SolverOptions, solve_ball_program

__all__ = [
    "State",
    "DiracSet",
    "UnboundednessProbe",
    "connes_distance",
    "connes_witness",
    "unboundedness_probe",
]

STATE_TRACE_TOL = 1e-10
UNBOUNDED_CAP = 1e6
STABILIZE_RTOL = 1e-4


@dataclass(frozen=True)
class State:
    """Density matrix: PSD Hermitian with unit trace."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = linalg.as_hermitian(self.matrix)
        if M.ndim != 2:
            raise ValueError(f"a state is a single matrix, got shape {M.shape}")
        scale = max(1.0, float(linalg.hermitian_op_norms(M[None])[0]))
        if float(linalg.min_eigenvalues(M[None])[0]) < -STATE_TRACE_TOL * scale:
            raise ValueError("state matrix is not PSD")
        tr = float(np.trace(M).real)
        if abs(tr - 1.0) > STATE_TRACE_TOL:
            raise ValueError(f"state trace must be 1, got {tr!r}")
        object.__setattr__(self, "matrix", _readonly(M))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DiracSet:
    """One or several Hermitian operators quantifying slope directions."""

    operators: np.ndarray = field(repr=False)   # (M, n, n)

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] < 1 or ops.shape[-1] != ops.shape[-2]:
            raise ValueError(f"expected stacked square operators, got shape {ops.shape}")
        object.__setattr__(self, "operators", _readonly(linalg.as_hermitian(ops)))

    @property
    def dim(self) -> int:
        return self.operators.shape[-1]

    @property
    def count(self) -> int:
        return self.operators.shape[0]


def _commutator_program(sigma: np.ndarray, diracs: DiracSet, kappa: float) -> BallProgram:
    # normalize the test function to the unit ball (f = kappa * f'); the
    # iteration then behaves identically for every kappa, which matters for
    # the doubling probe where kappa can grow past 1e6
    ops = diracs.operators

    def forward(F: np.ndarray) -> np.ndarray:
        f = F[0]
        return -1j * (ops @ f - f @ ops)

    def adjoint(Y: np.ndarray) -> np.ndarray:
        out = 1j * np.einsum("mij,mjk->ik", ops, Y)
        out -= 1j * np.einsum("mij,mjk->ik", Y, ops)
        return out[None]

    norms = linalg.hermitian_op_norms(ops)
    map_norm = 2.0 * float(np.sqrt((norms**2).sum()))
    return BallProgram(
        objective=sigma[None],
        ball_radii=np.ones(1),
        forward=forward,
        adjoint=adjoint,
        image_radii=np.full(diracs.count, 1.0 / kappa),
        map_norm=max(map_norm, 1e-300),
    )


def _solve_finite(sigma: np.ndarray, diracs: DiracSet, kappa: float,
                  options: SolverOptions) -> tuple[float, np.ndarray]:
    # the objective carries an absolute value; solve both sign variants and
    # keep the larger (each one is a linear-objective convex program)
    best = 0.0
    witness = np.zeros_like(sigma)
    for signed in (sigma, -sigma):
        solution = solve_ball_program(_commutator_program(signed, diracs, kappa), options)
        if kappa * solution.value > best:
            best = kappa * solution.value
            sign = 1.0 if signed is sigma else -1.0
            witness = sign * kappa * solution.witness[0]
    return best, witness


def connes_witness(
    rho1: State,
    rho2: State,
    diracs: DiracSet,
    kappa: float,
    options: SolverOptions | None = None,
) -> tuple[float, np.ndarray]:
    """Distance value together with the feasible test function attaining it.

    The witness is independently checkable: its operator norm is at most
    ``kappa``, every commutator norm at most 1, and the trace pairing with
    the state difference reproduces the value.
    """
    if rho1.dim != rho2.dim or rho1.dim != diracs.dim:
        raise ValueError(
            f"dimension mismatch: states {rho1.dim}, {rho2.dim}, diracs {diracs.dim}"
        )
    if not (math.isfinite(kappa) and kappa > 0):
        raise ValueError(f"witness extraction needs finite positive kappa, got {kappa}")
    options = options or SolverOptions()
    sigma = rho1.matrix - rho2.matrix
    if not sigma.any():
        return 0.0, np.zeros_like(sigma)
    return _solve_finite(sigma, diracs, kappa, options)


def connes_distance(
    rho1: State,
    rho2: State,
    diracs: DiracSet,
    kappa: float = math.inf,
    options: SolverOptions | None = None,
) -> float:
    """Spectral distance between two states; ``math.inf`` flags divergence.

    With finite ``kappa`` the bounded variant is solved directly.  With
    ``kappa = math.inf`` a doubling probe runs until the value stabilizes
    (relative change below 1e-4, reported as the limit) or exceeds 1e6
    (reported as unbounded).
    """
    if rho1.dim != rho2.dim or rho1.dim != diracs.dim:
        raise ValueError(
            f"dimension mismatch: states {rho1.dim}, {rho2.dim}, diracs {diracs.dim}"
        )
    options = options or SolverOptions()
    sigma = rho1.matrix - rho2.matrix
    if not sigma.any():
        return 0.0
    if math.isfinite(kappa):
        if kappa <= 0:
            raise ValueError(f"kappa must be positive, got {kappa}")
        return _solve_finite(sigma, diracs, kappa, options)[0]

    previous = None
    k = 1.0
    for _ in range(64):
        value = _solve_finite(sigma, diracs, k, options)[0]
        if value > UNBOUNDED_CAP:
            return math.inf
        if previous is not None and abs(value - previous) <= STABILIZE_RTOL * max(
            abs(value), 1e-300
        ):
            return value
        previous = value
        k *= 2.0
    raise ConvergenceError(
        f"doubling probe neither stabilized nor exceeded {UNBOUNDED_CAP:.0e}", None
    )


@dataclass(frozen=True)
class UnboundednessProbe:
    """Distance values along an increasing kappa schedule with the end slope."""

    kappas: tuple[float, ...]
    values: tuple[float, ...]
    final_slope: float


def unboundedness_probe(
    rho1: State,
    rho2: State,
    diracs: DiracSet,
    kappa_list,
    options: SolverOptions | None = None,
) -> UnboundednessProbe:
    """Evaluate the bounded distance along increasing kappa values.

    The values are monotone nondecreasing; a nonvanishing final slope is the
    numerical signature of an unbounded underlying distance.
    """
    kappas = [float(k) for k in kappa_list]
    if not kappas or any(k <= 0 for k in kappas) or any(
        b <= a for a, b in zip(kappas, kappas[1:])
    ):
        raise ValueError("kappa_list must be strictly increasing and positive")
    values = [connes_distance(rho1, rho2, diracs, k, options) for k in kappas]
    if len(kappas) > 1:
        slope = (values[-1] - values[-2]) / (kappas[-1] - kappas[-2])
    else:
        slope = 0.0
    return UnboundednessProbe(tuple(kappas), tuple(values), slope)
