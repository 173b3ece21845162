"""
Orthogonal-polynomial wavelet bases on [0, 1).

A basis keeps each wavelet and its first two iterated integrals (taken from
t = 0) as exact monomial polynomials in t. Those polynomials are the
reference objects. For numerical work at larger M, :func:`basis_values`
evaluates the same functions through the recurrence and Gauss-Legendre
quadrature, which stays accurate where monomial cancellation would not and
also runs in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import orthopoly
from .errors import DomainError, EvaluationError, ResolutionError
from .orthopoly import Family, Polynomial

MAX_BASIS_SIZE = 64
PROJECTION_NODES = 128

ORDERS = ("psi", "J1", "J2")


def antiderivative(p: Polynomial, nu: int = 1) -> Polynomial:
    """``nu``-fold iterated integral of ``p`` from 0 (all constants zero)."""
    nu = int(nu)
    if nu < 1:
        raise DomainError(f"integration order must be >= 1, got {nu}")
    if not len(p):
        return Polynomial()
    i = np.arange(len(p))
    # a_i * i! / (i + nu)!
    factor = np.array([math.exp(math.lgamma(k + 1) - math.lgamma(k + nu + 1)) for k in i])
    return Polynomial(np.concatenate((np.zeros(nu), p.coeffs * factor)))


@dataclass(frozen=True)
class WaveletBasis:
    family: Family
    J: int
    k_res: int
    n: int
    scales: tuple
    psi: tuple = field(repr=False)
    j1_psi: tuple = field(repr=False)
    j2_psi: tuple = field(repr=False)

    @property
    def M(self) -> int:
        return len(self.psi)

    @property
    def n_hat(self) -> int:
        return 2 * self.n - 1

    @property
    def support(self) -> tuple[float, float]:
        d = 2.0**self.k_res
        return ((self.n_hat - 1) / d, (self.n_hat + 1) / d)

    def local(self, t):
        """Map t to the reference variable of the underlying polynomials."""
        return 2.0**self.k_res * t - self.n_hat

    def rescaled(self, factors) -> WaveletBasis:
        """Copy with wavelet ``m`` multiplied by ``factors[m]``."""
        factors = np.broadcast_to(np.asarray(factors, dtype=float), (self.M,))
        return WaveletBasis(
            self.family,
            self.J,
            self.k_res,
            self.n,
            tuple(s * f for s, f in zip(self.scales, factors)),
            tuple(p.scale(f) for p, f in zip(self.psi, factors)),
            tuple(p.scale(f) for p, f in zip(self.j1_psi, factors)),
            tuple(p.scale(f) for p, f in zip(self.j2_psi, factors)),
        )

    @property
    def name(self) -> str:
        return f"{self.family} J={self.J} (M={self.M})"


def build_basis(fam: Family, J: int, k_res: int = 1, n: int = 1) -> WaveletBasis:
    """Wavelets ``2^{k/2} v_m O_m(2^k t - n_hat)`` for ``m < M = 2**J``."""
    J, k_res, n = int(J), int(k_res), int(n)
    if J < 0:
        raise DomainError(f"resolution level J must be >= 0, got {J}")
    if J > 6:
        raise ResolutionError(f"M = 2**{J} exceeds the maximum basis size {MAX_BASIS_SIZE}")
    if k_res < 1:
        raise DomainError(f"dilation level must be >= 1, got {k_res}")
    if not 1 <= n <= 2 ** (k_res - 1):
        raise DomainError(f"translation index n={n} outside 1..{2 ** (k_res - 1)}")
    M = 2**J
    n_hat = 2 * n - 1
    dil = 2.0**k_res
    scales, psi, j1, j2 = [], [], [], []
    for m in range(M):
        s = math.sqrt(dil) * orthopoly.norm_constant(fam, m)
        p = orthopoly.poly_coeffs(fam, m).compose_affine(dil, -n_hat).scale(s)
        scales.append(s)
        psi.append(p)
        j1.append(antiderivative(p, 1))
        j2.append(antiderivative(p, 2))
    return WaveletBasis(fam, J, k_res, n, tuple(scales), tuple(psi), tuple(j1), tuple(j2))


def _order_index(order: str) -> int:
    key = {"psi": 0, "j1": 1, "j2": 2}.get(str(order).lower())
    if key is None:
        raise DomainError(f"order must be one of {ORDERS}, got {order!r}")
    return key


def eval_basis(basis: WaveletBasis, order: str, m: int, t):
    """Evaluate ψ_m, Jψ_m or J²ψ_m from the stored polynomials."""
    if not 0 <= m < basis.M:
        raise IndexError(f"wavelet index {m} outside 0..{basis.M - 1}")
    table = (basis.psi, basis.j1_psi, basis.j2_psi)[_order_index(order)]
    return table[m](t)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int, dtype_name: str):
    dt = np.dtype(dtype_name)
    x0, _ = np.polynomial.legendre.leggauss(n)
    x = x0.astype(dt)
    # Newton polish so long-double nodes carry full precision
    for _ in range(4):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(1, n):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        dp = n * (x * p1 - p0) / (x * x - 1)
        x = x - p1 / dp
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1)
    w = 2 / ((1 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, dtype=float):
    """Gauss-Legendre nodes and weights on [-1, 1] in the requested dtype."""
    return _gauss_legendre(int(n), np.dtype(dtype).name)


def _psi_values(basis: WaveletBasis, t):
    raw = orthopoly.values(basis.family, basis.M - 1, basis.local(t))
    s = np.asarray(basis.scales, dtype=t.dtype).reshape((-1,) + (1,) * t.ndim)
    return raw * s


def basis_values(basis: WaveletBasis, t, dtype=None):
    """Return ``(psi, J1, J2)`` value matrices of shape ``(len(t), M)``.

    Uses the recurrence for ψ and exact Gauss-Legendre quadrature on [0, t]
    for the integrals. The arithmetic runs in ``dtype`` (default: that of
    ``t``, promoted to at least double).
    """
    t = np.atleast_1d(np.asarray(t))
    if dtype is None:
        dtype = np.result_type(t.dtype, np.float64)
    t = t.astype(dtype)
    psi = _psi_values(basis, t).T
    q = basis.M // 2 + 2
    xq, wq = gauss_legendre(q, dtype)
    s = 0.5 * (xq[None, :] + 1) * t[:, None]
    w = 0.5 * wq[None, :] * t[:, None]
    ps = _psi_values(basis, s)
    j1 = np.einsum("nq,mnq->nm", w, ps)
    j2 = np.einsum("nq,mnq->nm", w * (t[:, None] - s), ps)
    return psi, j1, j2


def _call_vectorised(f: Callable, t: np.ndarray) -> np.ndarray:
    try:
        v = np.asarray(f(t), dtype=float)
        if v.shape != t.shape:
            v = np.broadcast_to(v, t.shape).astype(float)
    except (TypeError, ValueError):
        v = np.array([float(f(x)) for x in t])
    bad = np.flatnonzero(~np.isfinite(v))
    if bad.size:
        raise EvaluationError("function returned a non-finite value", int(bad[0]))
    return v


def _quadrature_rule(basis: WaveletBasis, weighted: bool):
    """Nodes in t and weights for ∫_support g(t) w(x(t)) dt."""
    fam = basis.family
    dil = 2.0**basis.k_res
    if weighted and fam.tag in ("chebyshev", "gegenbauer"):
        # x = cos(theta) removes the endpoint singularity of the weight
        u, wu = gauss_legendre(PROJECTION_NODES)
        theta = 0.5 * math.pi * (u + 1)
        x = np.cos(theta)
        lam = 0.0 if fam.tag == "chebyshev" else fam.alpha
        w = 0.5 * math.pi * wu * np.sin(theta) ** (2 * lam)
    else:
        x, w = gauss_legendre(PROJECTION_NODES)
        if weighted:
            w = w * orthopoly.weight(fam, x)
    t = (x + basis.n_hat) / dil
    return t, w / dil


def gram_matrix(basis: WaveletBasis) -> np.ndarray:
    """Weighted Gram matrix of the wavelets, by quadrature."""
    t, w = _quadrature_rule(basis, True)
    psi = _psi_values(basis, t)
    return (psi * w) @ psi.T


def project(f: Callable, basis: WaveletBasis, weighted: bool = True) -> np.ndarray:
    """Expansion coefficients of ``f`` in ``basis``.

    With ``weighted=True`` this is the orthogonal projection in the family's
    weighted inner product, mapped to the support. Hermite and Laguerre
    wavelets are not orthonormal on a bounded cell, so their coefficients go
    through a weighted least-squares fit. ``weighted=False`` returns the plain integrals
    ``∫ f ψ_m dt`` with no correction.
    """
    t, w = _quadrature_rule(basis, weighted)
    fv = _call_vectorised(f, t)
    psi = _psi_values(basis, t)
    if weighted and basis.family.tag in ("hermite", "laguerre"):
        # weighted least squares gives the same coefficients as the Gram
        # system without squaring its condition number
        sw = np.sqrt(w)
        return np.linalg.lstsq((psi * sw).T, sw * fv, rcond=None)[0]
    return psi @ (w * fv)


def reconstruct(c, basis: WaveletBasis, t):
    """``sum_m c_m ψ_m(t)``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (basis.M,):
        raise DomainError(f"expected {basis.M} coefficients, got shape {c.shape}")
    tt = np.asarray(t, dtype=float)
    psi = _psi_values(basis, np.atleast_1d(tt))
    out = c @ psi
    return float(out[0]) if tt.ndim == 0 else out
