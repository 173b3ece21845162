import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavesbvp import orthopoly as op
from wavesbvp.errors import DomainError
from wavesbvp.metrics import convergence_study, error_report, paper_grid, report_from_values
from wavesbvp.sbvp import builtin
from wavesbvp.solver import solve_problem


def test_identical_values():
    r = report_from_values([0.0, 0.5], [1.0, 2.0], [1.0, 2.0])
    assert r.linf == 0 and r.l2 == 0


def test_two_errors():
    r = report_from_values([0.0, 1.0], [1.0, 2.0], [0.0, 0.0])
    assert r.linf == 2.0
    assert r.l2 == pytest.approx(math.sqrt(5))
    assert r.pointwise[1] == (1.0, 2.0, 0.0, 2.0)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
def test_norm_inequalities(errs):
    n = len(errs)
    r = report_from_values(np.zeros(n), np.asarray(errs), np.zeros(n))
    assert r.linf == max(abs(e) for e in errs)
    assert r.linf <= r.l2 * (1 + 1e-12) + 1e-300
    assert r.l2 <= math.sqrt(n) * r.linf * (1 + 1e-12)


def test_paper_grid():
    g = paper_grid()
    assert g[0] == 0 and g[-1] == 1 and len(g) == 10
    assert g[1] == 1 / 16 and g[-2] == 15 / 16


def test_error_report_example1():
    sol = solve_problem(builtin("example1"), op.HERMITE, 3)
    rep = error_report(sol)
    assert rep.n == 10
    assert 1e-9 < rep.linf <= 1e-7
    # deterministic
    assert error_report(sol) == rep


def test_error_report_explicit_points_and_exact():
    sol = solve_problem(builtin("manufactured"), op.LEGENDRE, 2)
    rep = error_report(sol, exact=lambda t: 1 - t**2, points=[0.1, 0.2])
    assert rep.n == 2 and rep.linf <= 1e-12


def test_error_report_needs_exact():
    sol = solve_problem(builtin("example3"), op.LEGENDRE, 2)
    with pytest.raises(DomainError):
        error_report(sol)


def test_manufactured_study():
    rows = convergence_study(builtin("manufactured"), op.CHEBYSHEV, "newton", range(2, 6))
    assert [r.J for r in rows] == [2, 3, 4, 5]
    assert all(r.error <= 1e-10 and r.metric == "linf" for r in rows)


def test_example1_trend():
    rows = convergence_study(builtin("example1"), op.LEGENDRE, "newton", range(1, 6))
    errs = [r.error for r in rows]
    assert all(b <= 2 * a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12


def test_example3_successive_differences():
    rows = convergence_study(builtin("example3"), op.LEGENDRE, "qa", [1, 2, 3])
    assert all(r.metric == "succ_diff" for r in rows)
    errs = [r.error for r in rows]
    assert errs[0] > errs[1] > errs[2] > 0


def test_failed_level_reports_nan():
    rows = convergence_study(builtin("example1"), op.LAGUERRE, "newton", [3, 4])
    assert rows[0].converged and not math.isnan(rows[0].error)
    assert not rows[1].converged and math.isnan(rows[1].error) and rows[1].message


def test_empty_range():
    with pytest.raises(DomainError):
        convergence_study(builtin("example1"), op.LEGENDRE, "newton", [])
