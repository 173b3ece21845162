"""Error norms and resolution sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .collocation import Grid
from .errors import DomainError, WaveSBVPError
from .orthopoly import Family
from .sbvp import Problem
from .solver import Solution, SolverConfig, solve
from .wavelet import build_basis

STUDY_GRID_POINTS = 33


def paper_grid() -> list[float]:
    """``0, 1/16, 3/16, ..., 15/16, 1``: the rows of the benchmark tables."""
    return [0.0] + [(2 * i + 1) / 16 for i in range(8)] + [1.0]


@dataclass(frozen=True)
class ErrorReport:
    linf: float
    l2: float
    pointwise: tuple  # (t, y_computed, y_exact, abs_error)

    @property
    def n(self) -> int:
        return len(self.pointwise)


def report_from_values(t, y, exact) -> ErrorReport:
    """Build a report from matching arrays of points, computed and exact values.

    The difference is formed in the inputs' precision before rounding.
    """
    t = np.asarray(t)
    y = np.asarray(y)
    exact = np.asarray(exact)
    err = np.abs(y - exact)
    rows = tuple(
        (float(a), float(b), float(c), float(d)) for a, b, c, d in zip(t, y, exact, err)
    )
    if not rows:
        return ErrorReport(0.0, 0.0, rows)
    return ErrorReport(float(np.max(err)), _l2(err), rows)


def _l2(err) -> float:
    # unnormalised discrete 2-norm, as in the benchmark tables; scaled by the
    # largest entry so tiny or huge errors neither underflow nor overflow
    top = np.max(err)
    if not top > 0 or not np.isfinite(top):
        return float(top)
    return float(top * np.sqrt(np.sum((err / top) ** 2)))


def _points(points) -> np.ndarray:
    if points is None:
        return np.asarray(paper_grid())
    if isinstance(points, Grid):
        return np.asarray(points.points)
    return np.asarray(list(points), dtype=float)


def error_report(solution: Solution, exact: Callable | None = None, points=None) -> ErrorReport:
    """Compare ``solution`` with the exact solution at ``points`` (default: paper grid)."""
    t = _points(points)
    dt = solution.representation.dtype
    tw = t.astype(dt)
    if exact is None:
        if not solution.problem.has_exact:
            raise DomainError(f"problem {solution.problem.name!r} has no exact solution")
        ex = solution.problem.exact_value(tw)
    else:
        ex = np.asarray(exact(tw))
    y = solution.y_exact_precision(tw)
    return report_from_values(t, y, ex)


@dataclass(frozen=True)
class StudyRow:
    J: int
    M: int
    error: float
    l2: float
    iterations: int
    converged: bool
    metric: str  # "linf" against the exact solution, or "succ_diff"
    message: str = ""


def _try_solve(problem, fam, J, config):
    try:
        return solve(problem, build_basis(fam, J), config), ""
    except WaveSBVPError as e:
        return None, str(e)


def convergence_study(
    problem: Problem,
    fam: Family,
    approach: str = "newton",
    J_range: Iterable[int] = range(1, 5),
    points: Sequence[float] | Grid | None = None,
    config: SolverConfig | None = None,
) -> list[StudyRow]:
    """One row per resolution level.

    With an exact solution the error column is L∞ on ``points`` (default:
    the paper grid). Without one it is ``max |y_J - y_{J+1}|`` on a fixed
    33-point uniform grid, which needs one extra solve at the top level.
    A level whose solve fails reports NaN errors and carries the message.
    """
    Js = sorted(set(int(j) for j in J_range))
    if not Js:
        raise DomainError("empty resolution range")
    if config is None:
        config = SolverConfig(approach=approach)
    elif config.approach != approach:
        config = SolverConfig(approach, config.max_iter, config.tol, config.guess, config.precision)
    rows = []
    if problem.has_exact:
        for J in Js:
            sol, msg = _try_solve(problem, fam, J, config)
            if sol is None:
                rows.append(StudyRow(J, 2**J, math.nan, math.nan, 0, False, "linf", msg))
                continue
            rep = error_report(sol, points=points)
            rows.append(StudyRow(J, 2**J, rep.linf, rep.l2, sol.iterations, sol.converged, "linf"))
        return rows
    grid = np.linspace(0.0, 1.0, STUDY_GRID_POINTS)
    sols = {J: _try_solve(problem, fam, J, config) for J in sorted(set(Js) | {j + 1 for j in Js})}
    for J in Js:
        sol, msg = sols[J]
        nxt, msg_next = sols[J + 1]
        if sol is None or nxt is None:
            it = sol.iterations if sol is not None else 0
            rows.append(StudyRow(J, 2**J, math.nan, math.nan, it, False, "succ_diff", msg or msg_next))
            continue
        gw = grid.astype(sol.representation.dtype)
        d = np.abs(sol.y_exact_precision(gw) - nxt.y_exact_precision(gw))
        rows.append(
            StudyRow(
                J,
                2**J,
                float(np.max(d)),
                _l2(d),
                sol.iterations,
                sol.converged and nxt.converged,
                "succ_diff",
            )
        )
    return rows
