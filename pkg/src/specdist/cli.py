"""Command-line front end.

Subcommands:

* ``dist``        distance between two measure files under a selected metric
* ``table1``      the full benchmark comparison table plus plot data
* ``gen-spectra`` write the three benchmark measures as measure files

Exit codes partition the error classes: 1 for I/O problems, 2 for validation
failures, 3 for solver non-convergence (partial results are still written,
flagged as unconverged).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .connes import DiracSet, State, connes_distance
from .matrix_dual import assemble_dual, solve_dual
from .matrix_primal import duality_gap
from .measures import MatrixMeasure, load_measure, make_uniform_grid, save_measure, tv_matrix
from .pdhg import ConvergenceError, SolverOptions
from .scalar_metrics import kolmogorov, tv_scalar, w1_balanced, w1_kappa_scalar
from .spectra import benchmark_measure, density_plot_data, paper_grid, itakura_saito, table1_report

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3

SCALAR_METRICS = ("tv", "kolmogorov", "w1", "w1k")
ALL_METRICS = SCALAR_METRICS + ("matrix-tv", "matrix-w1k", "is", "connes")


def _solver_options(args) -> SolverOptions:
    return SolverOptions(
        max_iterations=args.max_iter,
        tolerance=args.tol,
        gap_tolerance=getattr(args, "gap_tol", None),
    )


def _require_scalar(measure: MatrixMeasure, name: str):
    if measure.dim != 1:
        raise ValueError(
            f"{name} has matrix dimension {measure.dim}; scalar metrics need "
            "dim=1 (use matrix-tv or matrix-w1k)"
        )


def _matrix_encode(M: np.ndarray) -> list:
    return [[[float(M[i, j].real), float(M[i, j].imag)] for j in range(M.shape[1])]
            for i in range(M.shape[0])]


def _matrix_decode(doc) -> np.ndarray:
    arr = np.asarray(doc, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected an n x n matrix of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _load_diracs(path: str) -> DiracSet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"not a valid Dirac operator file: {exc}") from exc
    ops = doc["operators"] if isinstance(doc, dict) else doc
    return DiracSet(np.array([_matrix_decode(op) for op in ops]))


def _cmd_dist(args) -> int:
    mu1 = load_measure(args.first)
    mu2 = load_measure(args.second)
    options = _solver_options(args)
    report: dict = {
        "metric": args.metric,
        "inputs": [str(args.first), str(args.second)],
        "converged": True,
    }
    partial_exit = EXIT_OK
    try:
        if args.metric == "tv":
            _require_scalar(mu1, args.first)
            _require_scalar(mu2, args.second)
            report["value"] = tv_scalar(mu1, mu2)
        elif args.metric == "kolmogorov":
            _require_scalar(mu1, args.first)
            _require_scalar(mu2, args.second)
            report["value"] = kolmogorov(mu1, mu2)
        elif args.metric == "w1":
            _require_scalar(mu1, args.first)
            _require_scalar(mu2, args.second)
            report["value"] = w1_balanced(mu1, mu2)
        elif args.metric == "w1k":
            _require_scalar(mu1, args.first)
            _require_scalar(mu2, args.second)
            report["kappa"] = args.kappa
            report["value"] = w1_kappa_scalar(mu1, mu2, args.kappa)
        elif args.metric == "matrix-tv":
            report["value"] = tv_matrix(mu1, mu2)
        elif args.metric == "is":
            weights = mu1.grid.weights
            f = mu1.masses / weights[:, None, None]
            g = mu2.masses / weights[:, None, None]
            report["value"] = itakura_saito(f, g, weights=weights, thetas=mu1.grid.points)
        elif args.metric == "matrix-w1k":
            report["kappa"] = args.kappa
            problem = assemble_dual(mu1, mu2, args.kappa)
            cert = solve_dual(problem, options)
            report["value"] = cert.value
            report["certificate"] = {
                "iterations": cert.iterations,
                "feasibility_residual": cert.feasibility_residual,
                "upper_bound": cert.upper_bound,
                "gap": cert.gap,
            }
            if args.format == "structured":
                report["certificate"]["test_function"] = [
                    _matrix_encode(F) for F in cert.test_function
                ]
            if args.gap_audit:
                audit = duality_gap(mu1, mu2, args.kappa, options)
                report["gap_audit"] = {
                    "primal": audit.primal,
                    "dual": audit.dual,
                    "gap": audit.gap,
                    "relative_gap": audit.relative_gap,
                }
        elif args.metric == "connes":
            if not args.dirac:
                raise ValueError("--metric connes requires --dirac FILE")
            diracs = _load_diracs(args.dirac)
            rho1 = State(mu1.masses.sum(axis=0))
            rho2 = State(mu2.masses.sum(axis=0))
            kappa = math.inf if args.kappa == 0 else args.kappa
            value = connes_distance(rho1, rho2, diracs, kappa, options)
            report["kappa"] = "inf" if not math.isfinite(kappa) else kappa
            report["value"] = "unbounded" if math.isinf(value) else value
        else:  # unreachable behind argparse choices
            raise ValueError(f"unknown metric {args.metric}")
    except ConvergenceError as exc:
        report["converged"] = False
        report["error"] = str(exc)
        if exc.solution is not None:
            report["value"] = exc.solution.value
            report["upper_bound"] = exc.solution.upper_bound
        partial_exit = EXIT_SOLVER

    _emit_report(report, args)
    return partial_exit


def _emit_report(report: dict, args):
    fmt = args.format
    if fmt == "structured":
        text = json.dumps(report, indent=1)
    elif fmt == "csv":
        keys = [k for k in ("metric", "kappa", "value", "converged") if k in report]
        lines = [",".join(keys), ",".join(str(report[k]) for k in keys)]
        text = "\n".join(lines)
    else:
        lines = [f"{k:>22}: {v}" for k, v in report.items() if not isinstance(v, dict)]
        for key in ("certificate", "gap_audit"):
            if key in report:
                lines.append(f"{key}:")
                lines.extend(
                    f"{k:>22}: {v}"
                    for k, v in report[key].items()
                    if k != "test_function"
                )
        text = "\n".join(lines)
    _write_out(text, args.out)


def _write_out(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_table1(args) -> int:
    options = SolverOptions(
        max_iterations=args.max_iter,
        tolerance=args.tol,
        gap_tolerance=args.gap_tol,
    )
    grid = paper_grid() if args.grid_points is None else make_uniform_grid(
        args.grid_points, 0.0, math.pi
    )
    exit_code = EXIT_OK
    report = table1_report(
        kappa=args.kappa, options=options, grid=grid, gap_audit=args.gap_audit
    )

    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    cells = [
        {
            "metric": c.metric,
            "pair": f"f{c.pair[0]},f{c.pair[1]}",
            "value": c.value,
            "reference": c.reference,
            "relative_deviation": c.relative_deviation,
            "flagged": c.flagged,
            "note": c.note,
            "relative_gap": c.relative_gap,
            "iterations": c.iterations,
        }
        for c in report.cells
    ]
    if args.format == "structured":
        text = json.dumps({"kappa": report.kappa, "cells": cells}, indent=1)
    elif args.format == "csv":
        keys = list(cells[0].keys())
        rows = [",".join(keys)]
        rows += [",".join("" if c[k] is None else str(c[k]) for k in keys) for c in cells]
        text = "\n".join(rows)
    else:
        text = report.human_table()
    _write_out(text, str(out_dir / f"table1.{_ext(args.format)}") if out_dir else None)

    plot = density_plot_data(grid)
    if out_dir:
        plot_path = out_dir / "density_plot_data.csv"
        with open(plot_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            keys = list(plot.keys())
            writer.writerow(keys)
            for row in zip(*(plot[k] for k in keys)):
                writer.writerow([repr(float(v)) for v in row])
    return exit_code


def _ext(fmt: str) -> str:
    return {"structured": "json", "csv": "csv", "human-table": "txt"}[fmt]


def _cmd_gen_spectra(args) -> int:
    grid = paper_grid() if args.grid_points is None else make_uniform_grid(
        args.grid_points, 0.0, math.pi
    )
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(3):
        measure = benchmark_measure(i, grid, normalize=not args.raw)
        save_measure(measure, out_dir / f"f{i}.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specdist",
        description="Distances between scalar and matrix-valued spectral measures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="distance between two measure files")
    dist.add_argument("first")
    dist.add_argument("second")
    dist.add_argument("--metric", choices=ALL_METRICS, default="matrix-w1k")
    dist.add_argument("--kappa", type=float, default=1.0,
                      help="bound on test functions (0 means unbounded, connes only)")
    dist.add_argument("--tol", type=float, default=1e-6)
    dist.add_argument("--max-iter", type=int, default=200_000)
    dist.add_argument("--gap-tol", type=float, default=None, dest="gap_tol")
    dist.add_argument("--gap-audit", action="store_true",
                      help="also solve the transport side and report the duality gap")
    dist.add_argument("--dirac", default=None, help="JSON file with Dirac operators")
    dist.add_argument("--format", choices=("human-table", "csv", "structured"),
                      default="human-table")
    dist.add_argument("--out", default=None)
    dist.set_defaults(func=_cmd_dist)

    table = sub.add_parser("table1", help="benchmark distance table and plot data")
    table.add_argument("--kappa", type=float, default=1.0)
    table.add_argument("--tol", type=float, default=1e-3)
    table.add_argument("--max-iter", type=int, default=400_000)
    table.add_argument("--gap-tol", type=float, default=1e-3, dest="gap_tol")
    table.add_argument("--no-gap-audit", dest="gap_audit", action="store_false")
    table.add_argument("--grid-points", type=int, default=None)
    table.add_argument("--format", choices=("human-table", "csv", "structured"),
                       default="human-table")
    table.add_argument("--out", default=None,
                       help="directory for the table and the density plot data")
    table.set_defaults(func=_cmd_table1)

    gen = sub.add_parser("gen-spectra", help="write the three benchmark measures")
    gen.add_argument("--grid-points", type=int, default=None)
    gen.add_argument("--raw", action="store_true",
                     help="skip trace normalization of the densities")
    gen.add_argument("--out", default=None, help="output directory (default: cwd)")
    gen.set_defaults(func=_cmd_gen_spectra)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
