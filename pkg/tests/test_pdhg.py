import numpy as np
import pytest

from specdist import SolverOptions
from specdist.pdhg import BallProgram, solve_ball_program

from conftest import random_hermitian


def _no_constraints_program(C, radii):
    return BallProgram(
        objective=C,
        ball_radii=radii,
        forward=lambda F: np.zeros((0,) + F.shape[1:], dtype=F.dtype),
        adjoint=lambda Y: np.zeros_like(C),
        image_radii=np.zeros(0),
        map_norm=0.0,
    )


class TestSolverOptions:
    def test_defaults(self):
        opts = SolverOptions()
        assert opts.max_iterations == 200_000
        assert opts.tolerance == 1e-6
        assert opts.gap_target == 1e-6

    def test_gap_tolerance_overrides(self):
        assert SolverOptions(gap_tolerance=1e-3).gap_target == 1e-3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"tolerance": 0.0},
            {"check_every": 0},
            {"gap_tolerance": -1.0},
            {"primal_step": 0.0},
        ],
    )
    def test_rejects_nonpositive(self, kwargs):
        with pytest.raises(ValueError):
            SolverOptions(**kwargs)


class TestUnconstrainedImage:
    def test_dual_norm_closed_form(self, rng):
        C = np.array([random_hermitian(rng, 3) for _ in range(4)])
        radii = rng.uniform(0.2, 2.0, size=4)
        solution = solve_ball_program(_no_constraints_program(C, radii), SolverOptions())
        expected = sum(
            r * np.abs(np.linalg.eigvalsh(c)).sum() for r, c in zip(radii, C)
        )
        assert solution.value == pytest.approx(expected, abs=1e-10)
        assert solution.upper_bound == pytest.approx(expected, abs=1e-10)
        assert solution.iterations == 0

    def test_zero_objective_short_circuit(self):
        C = np.zeros((3, 2, 2), dtype=complex)
        solution = solve_ball_program(_no_constraints_program(C, np.ones(3)), SolverOptions())
        assert solution.value == 0.0
        assert solution.upper_bound == 0.0
        assert not solution.witness.any()


def test_certified_bounds_sandwich_the_value(rng):
    # adjacent-difference constraints on a 3-block chain
    C = np.array([random_hermitian(rng, 2) for _ in range(3)])
    gaps = np.array([0.5, 0.8])

    def forward(F):
        return F[:-1] - F[1:]

    def adjoint(Y):
        out = np.zeros((3, 2, 2), dtype=complex)
        out[:-1] += Y
        out[1:] -= Y
        return out

    program = BallProgram(
        objective=C,
        ball_radii=np.ones(3),
        forward=forward,
        adjoint=adjoint,
        image_radii=gaps,
        map_norm=2.0,
    )
    solution = solve_ball_program(program, SolverOptions(tolerance=1e-8))
    assert solution.value <= solution.upper_bound + 1e-12
    assert solution.gap <= 1e-7 * max(1.0, solution.upper_bound)
    assert solution.feasibility_residual <= 1e-12
