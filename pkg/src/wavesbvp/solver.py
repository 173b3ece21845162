"""
Wavelet collocation solvers.

The second derivative is expanded as ``y'' = sum_m c_m psi_m``; integrating
twice and eliminating the two integration constants with the boundary
conditions makes ``y`` and ``y'`` affine in ``c``. Collocating the ODE at the
grid midpoints then gives M nonlinear equations in M unknowns, solved either
by Newton-Raphson on ``c`` (WNA) or by quasilinearization, which solves one
linearised BVP per sweep (WQA).

Both run in a selectable working precision. ``"extended"`` uses
``np.longdouble`` (80-bit on x86-64); on platforms where that type is plain
double the two settings coincide.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr as ex
from .collocation import Grid, collocation_points
from .errors import (
    ConditioningError,
    DomainError,
    EvaluationError,
    SingularMatrixError,
)
from .sbvp import Dirichlet, Problem, Robin
from .wavelet import WaveletBasis, basis_values, build_basis

log = logging.getLogger(__name__)

APPROACHES = ("newton", "qa")
PRECISIONS = {"double": np.float64, "extended": np.longdouble}
PIVOT_TOL = 1e-14


def pivot_threshold(dtype) -> float:
    """Relative pivot floor: 1e-14 in double, scaled by machine epsilon otherwise."""
    eps = np.finfo(dtype).eps
    return PIVOT_TOL * float(eps / np.finfo(np.float64).eps)


def lu_solve(A, b):
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Works in the dtype of the inputs. Raises :class:`SingularMatrixError`
    when a pivot falls below ``1e-14`` times the largest entry of ``A``
    (for double; see :func:`pivot_threshold`).
    """
    A = np.array(A, copy=True)
    b = np.array(b, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if b.shape != (n,):
        raise DomainError(f"right-hand side has shape {b.shape}, expected ({n},)")
    dt = np.result_type(A, b, np.float64)
    A, b = A.astype(dt), b.astype(dt)
    scale = np.max(np.abs(A)) if n else 0
    if n and not np.isfinite(scale):
        raise SingularMatrixError("matrix has non-finite entries")
    thresh = pivot_threshold(dt) * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if not abs(A[p, k]) > thresh:
            raise SingularMatrixError(f"pivot {float(abs(A[p, k])):.3g} in column {k} below threshold")
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        l = A[k + 1 :, k] / A[k, k]
        A[k + 1 :, k:] -= np.outer(l, A[k, k:])
        b[k + 1 :] -= l * b[k]
    x = np.empty(n, dtype=dt)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1 :] @ x[k + 1 :]) / A[k, k]
    return x


def _equilibrated_solve(A, b):
    # unit column max-norms; keeps pivoting meaningful across basis scalings
    d = np.max(np.abs(A), axis=0)
    d[d == 0] = 1
    return lu_solve(A / d, b) / d


@dataclass(frozen=True)
class Affine:
    """Values of ``y``, ``y'`` and ``y''`` at fixed points as affine maps of ``c``."""

    t: np.ndarray
    y0: np.ndarray
    A: np.ndarray
    dy0: np.ndarray
    dA: np.ndarray
    psi: np.ndarray


class BoundaryRepresentation:
    """Boundary-treated expansion of ``y``, ``y'``, ``y''`` in the coefficients.

    Value conditions at both ends::

        y'(t) = (beta - alpha) + sum c_m (Jpsi_m(t) - J2psi_m(1))
        y(t)  = (1 - t) alpha + t beta + sum c_m (J2psi_m(t) - t J2psi_m(1))

    ``y'(0) = alpha`` with ``a y(1) + b y'(1) = beta``::

        y'(t) = alpha + sum c_m Jpsi_m(t)
        y(t)  = beta/a + (t - 1 - b/a) alpha
                + sum c_m (J2psi_m(t) - J2psi_m(1) - (b/a) Jpsi_m(1))
    """

    def __init__(self, basis: WaveletBasis, bc, dtype=np.float64):
        if isinstance(bc, Robin) and bc.a == 0:
            raise DomainError("Robin condition needs a != 0")
        if not isinstance(bc, (Dirichlet, Robin)):
            raise DomainError(f"unsupported boundary condition {bc!r}")
        self.basis = basis
        self.bc = bc
        self.dtype = np.dtype(dtype)
        _, j1, j2 = basis_values(basis, np.ones(1, dtype=self.dtype))
        self.j1_at_1 = j1[0]
        self.j2_at_1 = j2[0]
        self._cache: dict = {}

    @property
    def M(self) -> int:
        return self.basis.M

    def at(self, t) -> Affine:
        """Affine maps at the points ``t`` (cached per point set)."""
        t = np.atleast_1d(np.asarray(t, dtype=self.dtype))
        key = t.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        psi, j1, j2 = basis_values(self.basis, t, self.dtype)
        bc = self.bc
        one = np.ones_like(t)
        if isinstance(bc, Dirichlet):
            al, be = self.dtype.type(bc.alpha), self.dtype.type(bc.beta)
            y0 = (1 - t) * al + t * be
            A = j2 - t[:, None] * self.j2_at_1[None, :]
            dy0 = (be - al) * one
            dA = j1 - self.j2_at_1[None, :]
        else:
            al, a = self.dtype.type(bc.alpha), self.dtype.type(bc.a)
            b, be = self.dtype.type(bc.b), self.dtype.type(bc.beta)
            y0 = be / a + (t - 1 - b / a) * al
            A = j2 - (self.j2_at_1 + (b / a) * self.j1_at_1)[None, :]
            dy0 = al * one
            dA = j1
        out = Affine(t, y0, A, dy0, dA, psi)
        if len(self._cache) < 64:
            self._cache[key] = out
        return out

    def _coef(self, c):
        c = np.asarray(c)
        if c.shape != (self.M,):
            raise DomainError(f"expected {self.M} coefficients, got shape {c.shape}")
        return c.astype(np.result_type(c, self.dtype))

    def _eval(self, t, c, which):
        scalar = np.ndim(t) == 0
        aff = self.at(t)
        c = self._coef(c)
        if which == 0:
            v = aff.y0 + aff.A @ c
        elif which == 1:
            v = aff.dy0 + aff.dA @ c
        else:
            v = aff.psi @ c
        return v[0] if scalar else v

    def y(self, t, c):
        return self._eval(t, c, 0)

    def dy(self, t, c):
        return self._eval(t, c, 1)

    def d2y(self, t, c):
        return self._eval(t, c, 2)


def boundary_representation(basis: WaveletBasis, bc, dtype=np.float64) -> BoundaryRepresentation:
    return BoundaryRepresentation(basis, bc, dtype)


def _grid_array(grid: Grid, dtype):
    t = grid.array(dtype)
    if np.any(t <= 0):
        raise DomainError("collocation points must be positive")
    return t


def _f_at(problem: Problem, t, y, which="f"):
    fn = problem.f_value if which == "f" else problem.fy_value
    try:
        v = fn(t, y)
    except EvaluationError as e:
        i = e.index
        where = f" at collocation point {i} (t={float(t[i]):.6g})" if i is not None else ""
        raise EvaluationError(f"evaluating {which}{where}: {e}", i) from e
    return np.broadcast_to(v, t.shape)


def residual(problem: Problem, rep: BoundaryRepresentation, c, grid: Grid):
    """``F_l = y''(t_l) + (k/t_l) y'(t_l) + f(t_l, y(t_l))``."""
    t = _grid_array(grid, rep.dtype)
    aff = rep.at(t)
    c = rep._coef(c)
    y = aff.y0 + aff.A @ c
    dy = aff.dy0 + aff.dA @ c
    return aff.psi @ c + problem.k / t * dy + _f_at(problem, t, y)


def jacobian(problem: Problem, rep: BoundaryRepresentation, c, grid: Grid):
    """``dF_l/dc_m = psi_m(t_l) + (k/t_l) A'_lm + f_y(t_l, y(t_l)) A_lm``."""
    t = _grid_array(grid, rep.dtype)
    aff = rep.at(t)
    c = rep._coef(c)
    y = aff.y0 + aff.A @ c
    fy = _f_at(problem, t, y, "f_y")
    return aff.psi + (problem.k / t)[:, None] * aff.dA + fy[:, None] * aff.A


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    ``tol`` bounds the max-norm change of ``y`` at the collocation points
    between iterates. ``guess`` is a constant or one value per collocation
    point; ``None`` takes the problem's default.
    """

    approach: str = "newton"
    max_iter: int = 50
    tol: float = 1e-12
    guess: float | Sequence[float] | None = None
    precision: str = "extended"

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise DomainError(f"approach must be one of {APPROACHES}, got {self.approach!r}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if int(self.max_iter) < 1:
            raise DomainError("max_iter must be at least 1")
        if self.precision not in PRECISIONS:
            raise DomainError(f"precision must be one of {tuple(PRECISIONS)}")

    @property
    def dtype(self):
        return np.dtype(PRECISIONS[self.precision])


@dataclass
class Solution:
    problem: Problem
    basis: WaveletBasis
    config: SolverConfig
    c: np.ndarray
    representation: BoundaryRepresentation
    grid: Grid
    iterations: int
    update_history: list = field(default_factory=list)
    residual_norm: float = float("nan")
    converged: bool = False

    @property
    def method(self) -> str:
        """Method label such as ``LeWNA`` or ``ChWQA``."""
        tail = "WNA" if self.config.approach == "newton" else "WQA"
        return self.basis.family.short + tail

    def y_exact_precision(self, t):
        """``y(t)`` in the working precision."""
        return self.representation.y(t, self.c)

    def y(self, t):
        v = self.representation.y(t, self.c)
        return float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float)

    def dy(self, t):
        v = self.representation.dy(t, self.c)
        return float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float)

    def d2y(self, t):
        v = self.representation.d2y(t, self.c)
        return float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float)

    def y_grid(self):
        """Solution at the collocation points."""
        return self.y(np.asarray(self.grid.points))


def is_linear(problem: Problem) -> bool:
    """True when ``f`` is affine in ``y``: its parsed ``f_y`` does not involve ``y``.

    Callable nonlinearities are never assumed linear.
    """
    fy = problem.f_y
    return isinstance(fy, (ex.Num, ex.Var, ex.Neg, ex.BinOp, ex.Call)) and not ex.depends_on(fy, "y")


def _guess_values(problem, config, M, dtype):
    g = problem.guess if config.guess is None else config.guess
    g = np.asarray(g, dtype=dtype)
    if g.ndim == 0:
        return np.full(M, g, dtype=dtype)
    if g.shape != (M,):
        raise DomainError(f"initial guess needs 1 or {M} values, got {g.size}")
    return g.copy()


def _setup(problem, basis, config):
    grid = collocation_points(basis.M)
    rep = BoundaryRepresentation(basis, problem.bc, config.dtype)
    t = _grid_array(grid, rep.dtype)
    return grid, rep, t, rep.at(t)


def _finish(problem, basis, config, c, rep, grid, iterations, history, converged):
    try:
        r = residual(problem, rep, c, grid)
        rnorm = float(np.max(np.abs(r)))
    except EvaluationError:
        rnorm = float("inf")
    if converged and not rnorm <= 1e-8:
        log.warning("update converged but residual norm %.3g exceeds 1e-8", rnorm)
        converged = False
    return Solution(problem, basis, config, c, rep, grid, iterations, history, rnorm, converged)


def solve_newton(problem: Problem, basis: WaveletBasis, config: SolverConfig | None = None) -> Solution:
    """Newton-Raphson on the collocation equations for the coefficients."""
    config = config or SolverConfig()
    grid, rep, t, aff = _setup(problem, basis, config)
    target = _guess_values(problem, config, basis.M, rep.dtype)
    try:
        # coefficients whose y matches the guess at the grid; zero when the
        # guess is the boundary interpolant itself
        c = _equilibrated_solve(aff.A, target - aff.y0)
    except SingularMatrixError:
        c = np.zeros(basis.M, dtype=rep.dtype)
    linear = is_linear(problem)
    history: list[float] = []
    converged = False
    it = 0
    for it in range(1, int(config.max_iter) + 1):
        F = residual(problem, rep, c, grid)
        Jm = jacobian(problem, rep, c, grid)
        try:
            dc = _equilibrated_solve(Jm, F)
        except SingularMatrixError as e:
            raise ConditioningError(f"singular Jacobian: {e}", it) from e
        c = c - dc
        step = float(np.max(np.abs(aff.A @ dc)))
        history.append(step)
        log.debug("newton %d: |dy| = %.3e", it, step)
        if not np.isfinite(step):
            break
        # an affine residual is solved exactly by the first step
        if step <= config.tol or linear:
            converged = True
            break
    return _finish(problem, basis, config, c, rep, grid, it, history, converged)


def solve_qa(problem: Problem, basis: WaveletBasis, config: SolverConfig | None = None) -> Solution:
    """Quasilinearization: one linear collocation solve per sweep.

    Sweep r solves
    ``y'' + (k/t) y' + f_y(t, y_r) y = -f(t, y_r) + y_r f_y(t, y_r)``
    at the collocation points, with the boundary-treated expansion of ``y``.
    """
    if config is None:
        config = SolverConfig(approach="qa")
    grid, rep, t, aff = _setup(problem, basis, config)
    k_over_t = problem.k / t
    yr = _guess_values(problem, config, basis.M, rep.dtype)
    c = np.zeros(basis.M, dtype=rep.dtype)
    linear = is_linear(problem)
    history: list[float] = []
    converged = False
    it = 0
    for it in range(1, int(config.max_iter) + 1):
        fv = _f_at(problem, t, yr)
        fy = _f_at(problem, t, yr, "f_y")
        mat = aff.psi + k_over_t[:, None] * aff.dA + fy[:, None] * aff.A
        rhs = -fv + yr * fy - k_over_t * aff.dy0 - fy * aff.y0
        try:
            c = _equilibrated_solve(mat, rhs)
        except SingularMatrixError as e:
            raise ConditioningError(f"singular linearised system: {e}", it) from e
        y_new = aff.y0 + aff.A @ c
        step = float(np.max(np.abs(y_new - yr)))
        history.append(step)
        log.debug("qa %d: |dy| = %.3e", it, step)
        yr = y_new
        if not np.isfinite(step):
            break
        # for linear f the linearised problem is the problem itself
        if step <= config.tol or linear:
            converged = True
            break
    return _finish(problem, basis, config, c, rep, grid, it, history, converged)


def solve(problem: Problem, basis: WaveletBasis, config: SolverConfig | None = None) -> Solution:
    config = config or SolverConfig()
    if config.approach == "newton":
        return solve_newton(problem, basis, config)
    return solve_qa(problem, basis, config)


def solve_problem(problem: Problem, family, J: int, approach: str = "newton", **options) -> Solution:
    """Convenience wrapper: build the basis and solve in one call."""
    basis = build_basis(family, J)
    return solve(problem, basis, SolverConfig(approach=approach, **options))
