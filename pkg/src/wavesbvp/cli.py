"""
Command-line front end.

Subcommands::

    wavesbvp solve        --problem example1 --family hermite --J 3
    wavesbvp convergence  --problem example3 --J-min 1 --J-max 4 --format csv
    wavesbvp compare      --problem example2 --J 3
    wavesbvp approximate  --function "sin(3.141592653589793*t)" --J 4

Exit status: 0 on success, 2 when a solve does not converge or breaks down
numerically, 1 for usage and input errors.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from typing import Sequence

import numpy as np

from . import expr as ex
from .errors import (
    DomainError,
    EvaluationError,
    ExprSyntaxError,
    SchemaError,
    SingularMatrixError,
    UnknownProblemError,
    WaveSBVPError,
)
from .metrics import convergence_study, paper_grid, report_from_values
from .orthopoly import DEFAULT_GEGENBAUER_ALPHA, FAMILY_TAGS, all_families, family
from .sbvp import BUILTIN_NAMES, builtin, from_json
from .solver import APPROACHES, PRECISIONS, SolverConfig, solve
from .wavelet import build_basis, project, reconstruct

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2

APPROXIMATION_POINTS = 65


class UsageError(Exception):
    pass


# -- formatting ----------------------------------------------------------------

def fmt(v) -> str:
    """Nine significant digits; ``nan`` for missing values."""
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".9g")


def write_csv(out, header: Sequence[str], rows) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def write_table(out, header: Sequence[str], rows, notes=()) -> None:
    cells = [list(header)] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for line in notes:
        out.write(f"# {line}\n")
    for r in cells:
        out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _json_value(v):
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def write_json(out, doc) -> None:
    out.write(json.dumps(_json_value(doc), indent=2, allow_nan=False) + "\n")


# -- argument handling ---------------------------------------------------------

def _parse_floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"{what} needs at least one finite number")
    return vals


def parse_points(text: str | None, default=None) -> np.ndarray:
    """``"0,0.5,1"`` or ``"grid:N"`` (N uniform points on [0, 1])."""
    if text is None:
        return np.asarray(paper_grid() if default is None else default, dtype=float)
    if text.startswith("grid:"):
        try:
            n = int(text[5:])
        except ValueError:
            raise UsageError(f"bad grid size in {text!r}")
        if n < 2:
            raise UsageError("grid:N needs N >= 2")
        return np.linspace(0.0, 1.0, n)
    pts = np.asarray(_parse_floats(text, "--points"))
    if np.any((pts < 0) | (pts > 1)):
        raise UsageError("evaluation points must lie in [0, 1]")
    return pts


def _family(args):
    if args.alpha is not None and args.family != "gegenbauer":
        raise UsageError("--alpha only applies to --family gegenbauer")
    return family(args.family, args.alpha)


def _problem(args):
    if args.problem is not None and args.problem_file is not None:
        raise UsageError("give either --problem or --problem-file, not both")
    if args.problem_file is not None:
        with open(args.problem_file, "rb") as fh:
            return from_json(fh.read())
    if args.problem is None:
        raise UsageError("a problem is required (--problem NAME or --problem-file PATH)")
    return builtin(args.problem)


def _config(args, approach=None) -> SolverConfig:
    guess = None
    if args.guess is not None:
        g = _parse_floats(args.guess, "--guess")
        guess = g[0] if len(g) == 1 else tuple(g)
    return SolverConfig(
        approach=approach or args.approach,
        max_iter=args.max_iter,
        tol=args.tol,
        guess=guess,
        precision=args.precision,
    )


def _check_J(J):
    if J is None or J < 0:
        raise UsageError("J must be a non-negative integer")
    return J


# -- commands ------------------------------------------------------------------

def cmd_solve(args, out) -> int:
    problem = _problem(args)
    fam = _family(args)
    J = _check_J(args.J)
    config = _config(args)
    points = parse_points(args.points)
    sol = solve(problem, build_basis(fam, J), config)
    tw = points.astype(config.dtype)
    y = sol.y_exact_precision(tw)
    if problem.has_exact:
        exact = problem.exact_value(tw)
        rep = report_from_values(points, y, exact)
        rows = [r for r in rep.pointwise]
        linf, l2 = rep.linf, rep.l2
    else:
        rows = [(float(a), float(b), None, None) for a, b in zip(points, y)]
        linf = l2 = None
    if args.format == "json":
        write_json(
            out,
            {
                "problem": problem.name,
                "method": sol.method,
                "family": str(fam),
                "J": J,
                "M": sol.basis.M,
                "converged": sol.converged,
                "iterations": sol.iterations,
                "residual_norm": sol.residual_norm,
                "rows": [dict(t=a, y=b, exact=c, abs_error=d) for a, b, c, d in rows],
                "linf": linf,
                "l2": l2,
            },
        )
    else:
        header = ["t", "y", "exact", "abs_error"]
        if args.format == "csv":
            write_csv(out, header, rows)
        else:
            notes = [
                f"problem {problem.name}, method {sol.method} ({fam}), J={J}, M={sol.basis.M}",
                f"iterations {sol.iterations}, converged {sol.converged}, residual {fmt(sol.residual_norm)}",
            ]
            if linf is not None:
                notes.append(f"linf {fmt(linf)}, l2 {fmt(l2)}")
            write_table(out, header, rows, notes)
    if not sol.converged:
        print(
            f"wavesbvp: {sol.method} did not converge in {sol.iterations} iterations "
            f"(last update {fmt(sol.update_history[-1] if sol.update_history else None)})",
            file=sys.stderr,
        )
        return EXIT_SOLVER
    return EXIT_OK


def cmd_convergence(args, out) -> int:
    problem = _problem(args)
    fam = _family(args)
    lo = args.J_min
    hi = args.J_max
    if lo < 0:
        raise UsageError("--J-min must be >= 0")
    Js = list(range(lo, hi + 1))
    if not Js:
        raise UsageError(f"empty resolution range {lo}..{hi}")
    points = parse_points(args.points)
    rows = convergence_study(problem, fam, args.approach, Js, points=points, config=_config(args))
    metric = rows[0].metric
    header = ["J", "M", metric, "l2", "iterations"]
    data = [(r.J, r.M, r.error, r.l2, r.iterations) for r in rows]
    if args.format == "json":
        write_json(
            out,
            {
                "problem": problem.name,
                "family": str(fam),
                "approach": args.approach,
                "metric": metric,
                "rows": [
                    {"J": r.J, "M": r.M, metric: r.error, "l2": r.l2,
                     "iterations": r.iterations, "converged": r.converged}
                    for r in rows
                ],
            },
        )
    elif args.format == "csv":
        write_csv(out, header, data)
    else:
        write_table(out, header, data, [f"problem {problem.name}, {fam}, {args.approach}"])
    failed = [r for r in rows if not r.converged]
    for r in failed:
        print(f"wavesbvp: J={r.J}: {r.message or 'did not converge'}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_compare(args, out) -> int:
    problem = _problem(args)
    J = _check_J(args.J)
    alpha = DEFAULT_GEGENBAUER_ALPHA if args.alpha is None else args.alpha
    points = parse_points(args.points)
    columns, values, failures = [], [], []
    for approach in APPROACHES:
        config = _config(args, approach)
        tw = points.astype(config.dtype)
        for fam in all_families(alpha):
            basis = build_basis(fam, J)
            label = fam.short + ("WNA" if approach == "newton" else "WQA")
            columns.append(label)
            try:
                sol = solve(problem, basis, config)
            except (SingularMatrixError, EvaluationError) as e:
                failures.append(f"{label}: {e}")
                values.append(np.full(points.shape, np.nan))
                continue
            if not sol.converged:
                failures.append(f"{label}: did not converge in {sol.iterations} iterations")
                values.append(np.full(points.shape, np.nan))
                continue
            values.append(np.asarray(sol.y_exact_precision(tw), dtype=float))
    header = ["t"] + columns
    table = [points] + values
    if problem.has_exact:
        header.append("Exact")
        table.append(np.asarray(problem.exact_value(points), dtype=float))
    rows = list(zip(*table))
    if args.format == "json":
        write_json(
            out,
            {
                "problem": problem.name,
                "J": J,
                "M": 2**J,
                "methods": columns,
                "failed": [f.split(":")[0] for f in failures],
                "rows": [dict(zip(header, r)) for r in rows],
            },
        )
    elif args.format == "csv":
        write_csv(out, header, rows)
    else:
        write_table(out, header, rows, [f"problem {problem.name}, J={J}, M={2**J}"])
    for f in failures:
        print(f"wavesbvp: {f}", file=sys.stderr)
    return EXIT_SOLVER if failures else EXIT_OK


def cmd_approximate(args, out) -> int:
    if args.function is None:
        raise UsageError("approximate needs --function")
    fe = ex.parse(args.function)
    if ex.depends_on(fe, "y"):
        raise UsageError("--function may only depend on t")
    fam = _family(args)
    J = _check_J(args.J)
    basis = build_basis(fam, J)
    c = project(lambda t: ex.evaluate(fe, t), basis)
    t = parse_points(args.points, np.linspace(0.0, 1.0, APPROXIMATION_POINTS))
    fv = np.asarray(ex.evaluate(fe, t), dtype=float)
    rv = np.asarray(reconstruct(c, basis, t), dtype=float)
    err = np.abs(fv - rv)
    rows = list(zip(t, fv, rv, err))
    header = ["t", "f", "reconstruction", "error"]
    if args.format == "json":
        write_json(
            out,
            {
                "function": str(fe),
                "family": str(fam),
                "J": J,
                "M": basis.M,
                "coefficients": list(c),
                "rows": [dict(zip(header, r)) for r in rows],
                "max_error": float(np.max(err)),
            },
        )
    elif args.format == "csv":
        write_csv(out, header, rows)
    else:
        write_table(out, header, rows, [f"f(t) = {fe}, {fam}, J={J}, max error {fmt(np.max(err))}"])
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILY_TAGS, default="legendre")
    common.add_argument("--alpha", type=float, default=None, help="Gegenbauer parameter (default 1)")
    common.add_argument("--J", type=int, default=3, help="resolution level, M = 2**J (default 3)")
    common.add_argument("--points", default=None, help="comma list or grid:N (default: table grid)")
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--output", default="-", help="output path, '-' for stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--problem", default=None, help=f"builtin: {', '.join(BUILTIN_NAMES)}")
    solving.add_argument("--problem-file", default=None, help="JSON problem description")
    solving.add_argument("--approach", choices=APPROACHES, default="newton")
    solving.add_argument("--tol", type=float, default=1e-12)
    solving.add_argument("--max-iter", type=int, default=50)
    solving.add_argument("--guess", default=None, help="constant or one value per collocation point")
    solving.add_argument("--precision", choices=tuple(PRECISIONS), default="extended")

    parser = argparse.ArgumentParser(
        prog="wavesbvp",
        description="Wavelet collocation for singular two-point boundary value problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common, solving], help="solve one problem")
    conv = sub.add_parser("convergence", parents=[common, solving], help="error against resolution")
    conv.add_argument("--J-min", type=int, default=1)
    conv.add_argument("--J-max", type=int, default=4)
    sub.add_parser("compare", parents=[common, solving], help="all ten family/approach methods")
    approx = sub.add_parser("approximate", parents=[common], help="project a function of t")
    approx.add_argument("--function", default=None)
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "compare": cmd_compare,
    "approximate": cmd_approximate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on bad usage; our contract reserves 2 for solver failures
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    buf = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buf)
    except (UsageError, UnknownProblemError, SchemaError, ExprSyntaxError, DomainError, OSError) as e:
        print(f"wavesbvp: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularMatrixError, EvaluationError) as e:
        print(f"wavesbvp: solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except WaveSBVPError as e:
        print(f"wavesbvp: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = buf.getvalue()
    if args.output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        try:
            with open(args.output, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as e:
            print(f"wavesbvp: error: cannot write {args.output}: {e}", file=sys.stderr)
            return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
