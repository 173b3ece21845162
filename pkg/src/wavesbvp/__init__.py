"""
wavesbvp: orthogonal-polynomial wavelet collocation for singular boundary
value problems ``y'' + (k/t) y' + f(t, y) = 0`` on ``(0, 1]``.

>>> from wavesbvp import builtin, solve_problem, LEGENDRE
>>> sol = solve_problem(builtin("example1"), LEGENDRE, J=3)
>>> round(sol.y(0.5), 6)
0.960769
"""

from .collocation import Grid, collocation_points
from .errors import (
    ConditioningError,
    DomainError,
    EvaluationError,
    ExprSyntaxError,
    ResolutionError,
    SchemaError,
    SingularMatrixError,
    UnknownProblemError,
    UnsupportedWeightError,
    WaveSBVPError,
)
from .expr import d_dy, evaluate, parse
from .metrics import ErrorReport, convergence_study, error_report, paper_grid
from .orthopoly import (
    CHEBYSHEV,
    HERMITE,
    LAGUERRE,
    LEGENDRE,
    Family,
    Polynomial,
    all_families,
    family,
)
from .sbvp import BUILTIN_NAMES, Dirichlet, Problem, Robin, builtin, from_json, load, make_problem
from .solver import (
    BoundaryRepresentation,
    Solution,
    SolverConfig,
    boundary_representation,
    jacobian,
    residual,
    solve,
    solve_newton,
    solve_problem,
    solve_qa,
)
from .wavelet import WaveletBasis, basis_values, build_basis, eval_basis, project, reconstruct

__version__ = "0.1.0"
