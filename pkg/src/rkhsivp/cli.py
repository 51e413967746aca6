"""Command line front end.

Three subcommands cover the practical workflows:

``solve``
    Solve one problem (builtin or from a JSON file) and tabulate the
    solution on a report grid.  When the problem carries an exact solution
    the table lists exact value, approximate value, absolute and relative
    error; otherwise the approximation is compared against the adaptive
    reference integrator.

``converge``
    Re-solve the same problem for several collocation counts and report the
    max grid error, the residual sup-norm and the solve wall time per n.

``kernel-dump``
    Tabulate one kernel section R_x(y) with its first two y-derivatives and
    a symmetry check column, for eyeballing or plotting downstream.

Exit codes: 0 success, 2 configuration/usage, 3 expression syntax,
4 numerical failure, 5 domain violation.  All tables are CSV by default
(floats printed with 16 significant digits, so identical runs are
byte-identical) and JSON mirrors the same rows for programmatic use.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np

from .collocation import CollocationBasis, build_basis, uniform_points
from .errors import (
    ConfigError,
    DomainError,
    ExpressionSyntaxError,
    NumericError,
)
from .kernel_space import Interval, build_w23_kernel, eval_kernel
from .problem_model import AffineRhs, ExactSolution, ProblemSpec, builtin, verify_exact
from .reference_oracle import integrate
from .rhs_expr import affine_in
from .rhs_expr import evaluate as eval_expr
from .rhs_expr import parse as parse_expr
from .rkhs_solver import (
    RkhsSolution,
    error_report,
    residual_sup_norm,
    solve_linear,
    solve_nonlinear,
)

REPORT_GRID = (0.16, 0.32, 0.48, 0.64, 0.80, 0.96)

EXACT_COLUMNS = (
    "x_i",
    "Exact solution",
    "Approximate solution",
    "Absolute Error",
    "Relative error",
)
ORACLE_COLUMNS = ("x_i", "Approximate solution", "Oracle solution", "Deviation")
CONVERGE_COLUMNS = ("n", "max_absolute_error", "residual_sup_norm", "solve_seconds")
KERNEL_COLUMNS = ("y", "R", "dR", "d2R", "symmetry_gap")

_CONFIG_KEYS = ("name", "k", "a", "T", "alpha", "beta", "rhs")

Cell = Union[int, float, None]


# ---------------------------------------------------------------------------
# problem loading


def _config_number(raw: dict, key: str) -> float:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
    return float(value)


def _parse_config_expr(raw: dict, key: str):
    value = raw[key]
    if not isinstance(value, str):
        raise ConfigError(f"config key {key!r} must be an expression string")
    try:
        return parse_expr(value)
    except ExpressionSyntaxError as exc:
        raise ExpressionSyntaxError(f"config key {key!r}: {exc.message}", exc.offset) from exc


def load_problem_config(path: str, strict: bool = False) -> ProblemSpec:
    """Read a JSON problem definition.

    Required keys: name, k, a, T, alpha, beta, rhs.  Optional: exact, an
    expression in x whose derivatives are taken by finite differences.  When
    an exact solution is given it is substituted into the equation; a
    residual above 1e-6 (or an initial-condition mismatch above 1e-7) is
    reported as a warning, or as an error under strict mode.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    for key in _CONFIG_KEYS:
        if key not in raw:
            raise ConfigError(f"config is missing required key {key!r}")
    unknown = sorted(set(raw) - set(_CONFIG_KEYS) - {"exact"})
    if unknown:
        raise ConfigError(f"config has unknown keys: {', '.join(unknown)}")

    name = raw["name"]
    if not isinstance(name, str) or not name:
        raise ConfigError("config key 'name' must be a non-empty string")
    k = _config_number(raw, "k")
    if k < 0:
        raise ConfigError(f"config key 'k' must be nonnegative, got {k:g}")
    try:
        interval = Interval(_config_number(raw, "a"), _config_number(raw, "T"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    alpha = _config_number(raw, "alpha")
    beta = _config_number(raw, "beta")

    rhs_ast = _parse_config_expr(raw, "rhs")

    def rhs(x: float, u: float) -> float:
        return eval_expr(rhs_ast, x, u)

    affine = None
    if affine_in(rhs_ast, "u"):
        # Structurally F(x, u) = g(x) + q(x) u, so two evaluations recover
        # the pieces and the fast linear path becomes available.
        def g(x: float) -> float:
            return eval_expr(rhs_ast, x, 0.0)

        def q(x: float) -> float:
            return eval_expr(rhs_ast, x, 1.0) - eval_expr(rhs_ast, x, 0.0)

        affine = AffineRhs(g, q)

    exact = None
    if raw.get("exact") is not None:
        exact_ast = _parse_config_expr(raw, "exact")

        def u_exact(x: float) -> float:
            return eval_expr(exact_ast, x, 0.0)

        exact = ExactSolution.from_function(u_exact)

    problem = ProblemSpec(
        name=name,
        k=k,
        interval=interval,
        alpha=alpha,
        beta=beta,
        rhs=rhs,
        affine=affine,
        exact=exact,
    )
    if exact is not None:
        report = verify_exact(problem)
        if not report.ok:
            msg = (
                f"exact solution check failed: max ODE residual {report.max_residual:.3e}, "
                f"initial value error {report.ic_value_error:.3e}, "
                f"initial slope error {report.ic_slope_error:.3e}"
            )
            if strict:
                raise ConfigError(msg)
            print(f"warning: {msg}", file=sys.stderr)
    return problem


def _load_problem(args: argparse.Namespace) -> ProblemSpec:
    if args.problem is not None:
        return builtin(args.problem)
    return load_problem_config(args.config, strict=args.strict)


# ---------------------------------------------------------------------------
# shared solve plumbing


def _resolve_method(problem: ProblemSpec, method: str) -> str:
    if method == "auto":
        return "linear" if problem.is_linear else "nonlinear"
    return method


def _build_basis(problem: ProblemSpec, n: int) -> CollocationBasis:
    kernel = build_w23_kernel(problem.interval, cache_size=max(512, 4 * n))
    return build_basis(kernel, problem.k, uniform_points(problem.interval, n))


def _timed_solve(
    problem: ProblemSpec,
    basis: CollocationBasis,
    method: str,
    sweeps: int,
    tol: float,
) -> tuple[RkhsSolution, float]:
    """Solve on a prebuilt basis; the clock covers the solve step only."""
    start = time.perf_counter()
    if method == "linear":
        sol = solve_linear(problem, basis)
    else:
        sol = solve_nonlinear(problem, basis, sweeps=sweeps, tol=tol)
    return sol, time.perf_counter() - start


def _parse_grid(text: str, interval: Interval) -> list[float]:
    if text.strip() == "paper":
        points = [float(x) for x in REPORT_GRID]
    else:
        points = []
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                points.append(float(token))
            except ValueError as exc:
                raise ConfigError(f"bad grid value {token!r}") from exc
        if not points:
            raise ConfigError("grid must contain at least one point")
    for x in points:
        if not interval.a < x <= interval.T:
            raise ConfigError(
                f"grid point {x:g} lies outside ({interval.a:g}, {interval.T:g}]"
            )
    return points


def _parse_n_list(text: str) -> list[int]:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(int(token))
        except ValueError as exc:
            raise ConfigError(f"bad n value {token!r}") from exc
    if not values:
        raise ConfigError("n list must not be empty")
    for n in values:
        if n < 1:
            raise ConfigError("n must be >= 1")
    return values


def _measure_grid(interval: Interval, m: int = 200) -> np.ndarray:
    j = np.arange(1, m + 1, dtype=float)
    return interval.a + j * interval.length / m


# ---------------------------------------------------------------------------
# output plumbing


def _format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".16g")


def _round_cell(value: Cell) -> Cell:
    if value is None or isinstance(value, (int, np.integer)):
        return value
    return float(value)


def _write_table(
    fh: TextIO,
    fmt: str,
    columns: Sequence[str],
    rows: Sequence[Sequence[Cell]],
    meta: Optional[dict] = None,
) -> None:
    if fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    else:
        payload = dict(meta or {})
        payload["columns"] = list(columns)
        payload["rows"] = [[_round_cell(cell) for cell in row] for row in rows]
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _emit(
    args: argparse.Namespace,
    columns: Sequence[str],
    rows: Sequence[Sequence[Cell]],
    meta: Optional[dict] = None,
) -> None:
    if args.output in (None, "-"):
        _write_table(sys.stdout, args.format, columns, rows, meta)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            _write_table(fh, args.format, columns, rows, meta)


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args: argparse.Namespace) -> int:
    problem = _load_problem(args)
    grid = _parse_grid(args.grid, problem.interval)
    basis = _build_basis(problem, args.n)
    method = _resolve_method(problem, args.method)
    sol, seconds = _timed_solve(problem, basis, method, args.sweeps, args.tol)

    meta: dict = {"problem": problem.name, "n": args.n, "method": method}
    if problem.exact is not None:
        report = error_report(sol, grid)
        rows = [
            (r.x, r.exact, r.approximate, r.absolute, r.relative) for r in report.rows
        ]
        columns = EXACT_COLUMNS
        meta["max_absolute_error"] = report.max_absolute
        meta["max_relative_error"] = report.max_relative
        summary = f"max absolute error {report.max_absolute:.3e}"
    else:
        oracle = integrate(problem, tol=args.oracle_tol)
        rows = []
        for x in grid:
            approx = sol(x)
            ref = oracle.u(x)
            rows.append((x, approx, ref, abs(approx - ref)))
        columns = ORACLE_COLUMNS
        worst = max(row[3] for row in rows)
        meta["max_deviation"] = worst
        summary = f"max oracle deviation {worst:.3e}"
    _emit(args, columns, rows, meta)
    print(
        f"{problem.name}: n={args.n} ({method}) solved in {seconds:.3f} s; {summary}",
        file=sys.stderr,
    )
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    problem = _load_problem(args)
    ns = _parse_n_list(args.n_list)
    grid = _measure_grid(problem.interval)
    if problem.exact is not None:
        reference: Callable[[float], float] = problem.exact.u
    else:
        oracle = integrate(problem, tol=args.oracle_tol)
        reference = oracle.u

    rows = []
    for n in ns:
        basis = _build_basis(problem, n)
        method = _resolve_method(problem, args.method)
        sol, seconds = _timed_solve(problem, basis, method, args.sweeps, args.tol)
        err = max(abs(sol(x) - reference(x)) for x in grid)
        res = residual_sup_norm(sol)
        rows.append((n, err, res, seconds))

    for prev, cur in zip(rows, rows[1:]):
        if cur[0] > prev[0] and cur[1] >= prev[1]:
            print(
                f"warning: max absolute error did not decrease from n={prev[0]} to n={cur[0]}",
                file=sys.stderr,
            )
        if cur[0] > prev[0] and cur[2] >= prev[2]:
            print(
                f"warning: residual sup-norm did not decrease from n={prev[0]} to n={cur[0]}",
                file=sys.stderr,
            )
    meta = {"problem": problem.name, "method": _resolve_method(problem, args.method)}
    _emit(args, CONVERGE_COLUMNS, rows, meta)
    return 0


def cmd_kernel_dump(args: argparse.Namespace) -> int:
    try:
        interval = Interval(args.a, args.T)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not interval.contains(args.x):
        raise ConfigError(
            f"x={args.x:g} lies outside [{interval.a:g}, {interval.T:g}]"
        )
    if args.resolution < 2:
        raise ConfigError("resolution must be >= 2")
    kernel = build_w23_kernel(interval, cache_size=max(512, args.resolution + 8))
    x = float(args.x)
    rows = []
    for y in np.linspace(interval.a, interval.T, args.resolution):
        y = float(y)
        rows.append(
            (
                y,
                eval_kernel(kernel, x, y),
                eval_kernel(kernel, x, y, 1),
                eval_kernel(kernel, x, y, 2),
                abs(eval_kernel(kernel, x, y) - eval_kernel(kernel, y, x)),
            )
        )
    meta = {"a": interval.a, "T": interval.T, "x": x}
    _emit(args, KERNEL_COLUMNS, rows, meta)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_problem_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--problem", help="builtin problem name (ex1, ex2, ex3)")
    source.add_argument("--config", help="path to a JSON problem definition")
    parser.add_argument(
        "--strict",
        action="store_true",
        help="escalate exact-solution validation warnings to errors",
    )


def _add_solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--method",
        choices=("auto", "linear", "nonlinear"),
        default="auto",
        help="solution path; auto picks linear when the right-hand side is affine",
    )
    parser.add_argument(
        "--sweeps", type=int, default=1, help="forward sweeps for the nonlinear path"
    )
    parser.add_argument(
        "--tol",
        type=float,
        default=1e-10,
        help="stopping tolerance between successive sweeps",
    )
    parser.add_argument(
        "--oracle-tol",
        type=float,
        default=1e-10,
        help="reference integrator tolerance, used when no exact solution is known",
    )


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument(
        "--output", default="-", metavar="PATH", help="output file, - for stdout"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rkhsivp",
        description=(
            "Reproducing kernel collocation for the singular initial value "
            "problem u'' + (k/x) u' = F(x, u), u(a) = alpha, u'(a) = beta."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one problem and tabulate errors")
    _add_problem_source(solve)
    solve.add_argument(
        "--n", type=int, default=100, help="number of collocation points"
    )
    _add_solver_options(solve)
    solve.add_argument(
        "--grid",
        default="paper",
        help='report grid: "paper" (0.16,0.32,...,0.96) or comma-separated x values',
    )
    _add_output_options(solve)
    solve.set_defaults(func=cmd_solve)

    converge = sub.add_parser(
        "converge", help="tabulate error and residual trends over several n"
    )
    _add_problem_source(converge)
    converge.add_argument(
        "--n-list",
        required=True,
        help="comma-separated collocation counts, e.g. 25,50,100",
    )
    _add_solver_options(converge)
    _add_output_options(converge)
    converge.set_defaults(func=cmd_converge)

    dump = sub.add_parser(
        "kernel-dump", help="tabulate one kernel section on a uniform y grid"
    )
    dump.add_argument("--a", type=float, required=True, help="left endpoint")
    dump.add_argument("--T", type=float, required=True, help="right endpoint")
    dump.add_argument("--x", type=float, required=True, help="section point")
    dump.add_argument(
        "--resolution", type=int, default=201, help="number of y samples"
    )
    _add_output_options(dump)
    dump.set_defaults(func=cmd_kernel_dump)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ExpressionSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    raise SystemExit(main())
