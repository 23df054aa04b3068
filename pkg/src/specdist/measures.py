"""Discrete scalar and matrix-valued measures on an interval.

A measure is a grid of frequencies plus one PSD Hermitian mass matrix per
grid point (scalars are the 1x1 case).  Masses are stored already weighted,
i.e. ``M_k`` is the measure of the singleton ``{theta_k}``; every metric in
this package consumes masses, which keeps them quadrature-agnostic.

The module also defines the measure file format used by the CLI: a JSON
document with fields ``dim``, ``grid`` (list of ``{"theta": .., "weight": ..}``)
and ``masses`` (list of n x n matrices, entries as ``[re, im]`` pairs,
row-major).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg

PSD_TOL = 1e-10
MASS_EQUALITY_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Ordered frequencies with quadrature weights.

    The ground distance between grid points is ``|theta_i - theta_j|`` and is
    always derived from ``points``, never stored.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).copy()
        wts = np.asarray(self.weights, dtype=float).copy()
        if pts.ndim != 1 or wts.ndim != 1 or pts.size != wts.size:
            raise ValueError("grid points and weights must be 1-d of equal length")
        if pts.size < 1:
            raise ValueError("grid needs at least one point")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if not np.all(wts > 0):
            raise ValueError("grid weights must be positive")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "weights", _readonly(wts))

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def spacings(self) -> np.ndarray:
        """Adjacent gaps theta_{k+1} - theta_k (length K - 1)."""
        return np.diff(self.points)

    def distance_matrix(self) -> np.ndarray:
        """All pairwise ground distances |theta_i - theta_j|."""
        return np.abs(self.points[:, None] - self.points[None, :])

    def same_as(self, other: "Grid") -> bool:
        return (
            self.points.size == other.points.size
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )


def make_uniform_grid(K: int, a: float, b: float) -> Grid:
    """K equally spaced points on [a, b] with closed trapezoid weights."""
    if K < 2:
        raise ValueError(f"need at least 2 grid points, got {K}")
    if not b > a:
        raise ValueError(f"invalid interval [{a}, {b}]")
    step = (b - a) / (K - 1)
    weights = np.full(K, step)
    weights[0] = weights[-1] = step / 2
    return Grid(np.linspace(a, b, K), weights)


@dataclass(frozen=True)
class MatrixMeasure:
    """A grid plus one PSD Hermitian mass matrix per grid point."""

    grid: Grid
    masses: np.ndarray = field(repr=False)

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=complex)
        if masses.ndim != 3 or masses.shape[-1] != masses.shape[-2]:
            raise ValueError(f"masses must have shape (K, n, n), got {masses.shape}")
        if masses.shape[0] != self.grid.size:
            raise ValueError(
                f"got {masses.shape[0]} masses for a grid of {self.grid.size} points"
            )
        masses = linalg.as_hermitian(masses)
        floors = -PSD_TOL * np.maximum(1.0, linalg.hermitian_op_norms(masses))
        min_eigs = linalg.min_eigenvalues(masses)
        bad = np.nonzero(min_eigs < floors)[0]
        if bad.size:
            k = int(bad[0])
            raise ValueError(
                f"mass at grid point theta={self.grid.points[k]:.6g} (index {k}) "
                f"is not PSD: min eigenvalue {min_eigs[k]:.3e}"
            )
        object.__setattr__(self, "masses", _readonly(masses))

    @property
    def dim(self) -> int:
        return self.masses.shape[-1]

    def scalar_values(self) -> np.ndarray:
        """Real mass values for a 1x1 (scalar) measure."""
        if self.dim != 1:
            raise ValueError(f"not a scalar measure (dim={self.dim})")
        return self.masses[:, 0, 0].real


def scalar_measure(grid: Grid, values) -> MatrixMeasure:
    """Build a scalar (1x1) measure from nonnegative per-point masses."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} values, got shape {values.shape}")
    return MatrixMeasure(grid, values.reshape(-1, 1, 1).astype(complex))


def density_to_measure(grid: Grid, density) -> MatrixMeasure:
    """Discretize ``d mu = f(theta) d theta``: mass_k = weight_k * f(theta_k).

    ``density`` maps a frequency to a PSD Hermitian matrix (or a nonnegative
    scalar, taken as a 1x1 matrix).  A non-PSD sample raises ``ValueError``
    naming the offending grid point.
    """
    samples = []
    for theta in grid.points:
        s = np.asarray(density(float(theta)), dtype=complex)
        if s.ndim == 0:
            s = s.reshape(1, 1)
        samples.append(s)
    samples = np.asarray(samples)
    samples = linalg.as_hermitian(samples)
    floors = -PSD_TOL * np.maximum(1.0, linalg.hermitian_op_norms(samples))
    min_eigs = linalg.min_eigenvalues(samples)
    bad = np.nonzero(min_eigs < floors)[0]
    if bad.size:
        k = int(bad[0])
        raise ValueError(
            f"density sample at theta={grid.points[k]:.6g} is not PSD "
            f"(min eigenvalue {min_eigs[k]:.3e})"
        )
    return MatrixMeasure(grid, grid.weights[:, None, None] * samples)


def total_mass(measure: MatrixMeasure) -> np.ndarray:
    """Sum of the mass matrices (the total matricial mass)."""
    return measure.masses.sum(axis=0)


def _check_compatible(mu1: MatrixMeasure, mu2: MatrixMeasure):
    if not mu1.grid.same_as(mu2.grid):
        raise ValueError("measures live on different grids")
    if mu1.dim != mu2.dim:
        raise ValueError(f"dimension mismatch: {mu1.dim} vs {mu2.dim}")


def tv_matrix(mu1: MatrixMeasure, mu2: MatrixMeasure) -> float:
    """Matricial total variation: sum over points of the nuclear norm of the
    mass difference."""
    _check_compatible(mu1, mu2)
    return float(linalg.hermitian_nuclear_norms(mu1.masses - mu2.masses).sum())


# ---------------------------------------------------------------------------
# measure file format
# ---------------------------------------------------------------------------

def measure_to_dict(measure: MatrixMeasure) -> dict:
    """Plain-data form of a measure (floats keep full double precision)."""
    n = measure.dim
    masses = [
        [[[float(m[i, j].real), float(m[i, j].imag)] for j in range(n)] for i in range(n)]
        for m in measure.masses
    ]
    return {
        "dim": n,
        "grid": [
            {"theta": float(t), "weight": float(w)}
            for t, w in zip(measure.grid.points, measure.grid.weights)
        ],
        "masses": masses,
    }


def measure_from_dict(doc: dict) -> MatrixMeasure:
    try:
        n = int(doc["dim"])
        points = [float(entry["theta"]) for entry in doc["grid"]]
        weights = [float(entry["weight"]) for entry in doc["grid"]]
        raw = doc["masses"]
        masses = np.empty((len(raw), n, n), dtype=complex)
        for k, mat in enumerate(raw):
            for i in range(n):
                for j in range(n):
                    re, im = mat[i][j]
                    masses[k, i, j] = complex(re, im)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed measure document: {exc}") from exc
    return MatrixMeasure(Grid(np.array(points), np.array(weights)), masses)


def save_measure(measure: MatrixMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(measure_to_dict(measure), fh, indent=1)
        fh.write("\n")


def load_measure(path) -> MatrixMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"not a valid measure file: {exc}") from exc
    return measure_from_dict(doc)
