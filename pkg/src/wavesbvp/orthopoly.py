"""
Classical orthogonal polynomial families.

Values come from the three-term recurrences and work for any numpy float
dtype (``np.longdouble`` included), so the same code serves both the
double-precision monomial expansions and the extended-precision solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ResolutionError, UnsupportedWeightError

MAX_ORDER = 64

FAMILY_TAGS = ("chebyshev", "hermite", "laguerre", "legendre", "gegenbauer")
BOUNDED_FAMILIES = ("legendre", "chebyshev", "gegenbauer")

DEFAULT_GEGENBAUER_ALPHA = 1.0


@dataclass(frozen=True)
class Family:
    """A polynomial family; ``alpha`` is only meaningful for Gegenbauer."""

    tag: str
    alpha: float = DEFAULT_GEGENBAUER_ALPHA

    def __post_init__(self):
        tag = self.tag.lower()
        if tag not in FAMILY_TAGS:
            raise DomainError(f"unknown polynomial family {self.tag!r}")
        object.__setattr__(self, "tag", tag)
        if tag == "gegenbauer":
            a = float(self.alpha)
            if not (a > -0.5) or a == 0.0 or not math.isfinite(a):
                raise DomainError(
                    f"Gegenbauer alpha must exceed -1/2 and be non-zero, got {self.alpha}"
                )
        else:
            object.__setattr__(self, "alpha", DEFAULT_GEGENBAUER_ALPHA)

    @property
    def short(self) -> str:
        """Two-letter prefix used in method names (Ch, He, La, Le, Ge)."""
        return self.tag[:2].capitalize()

    def __str__(self):
        if self.tag == "gegenbauer":
            return f"gegenbauer(alpha={self.alpha:g})"
        return self.tag


CHEBYSHEV = Family("chebyshev")
HERMITE = Family("hermite")
LAGUERRE = Family("laguerre")
LEGENDRE = Family("legendre")


def family(tag: str | Family, alpha: float | None = None) -> Family:
    if isinstance(tag, Family):
        return tag
    if alpha is None:
        alpha = DEFAULT_GEGENBAUER_ALPHA
    return Family(tag, alpha)


def all_families(alpha: float = DEFAULT_GEGENBAUER_ALPHA) -> list[Family]:
    """The five families in table order: Ch, Ge, Le, La, He."""
    return [
        CHEBYSHEV,
        Family("gegenbauer", alpha),
        LEGENDRE,
        LAGUERRE,
        HERMITE,
    ]


def _check_order(m: int) -> int:
    m = int(m)
    if m < 0:
        raise DomainError(f"polynomial order must be non-negative, got {m}")
    if m > MAX_ORDER:
        raise ResolutionError(f"order {m} exceeds the supported maximum {MAX_ORDER}")
    return m


class Polynomial:
    """Dense monomial polynomial, ``coeffs[i]`` multiplies ``x**i``.

    Trailing zeros are trimmed, so the zero polynomial has no coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[float] = ()):
        c = np.array(coeffs, dtype=float).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self.coeffs = c

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or an array."""
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=np.result_type(x, float))
        for a in self.coeffs[::-1]:
            out = out * x + a
        return out[()] if out.ndim == 0 else out

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self), len(other))
        out = np.zeros(n)
        out[: len(self)] += self.coeffs
        out[: len(other)] += other.coeffs
        return Polynomial(out)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + other.scale(-1.0)

    def __mul__(self, other: Polynomial) -> Polynomial:
        if not len(self) or not len(other):
            return Polynomial()
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def scale(self, s: float) -> Polynomial:
        return Polynomial(self.coeffs * s)

    def deriv(self) -> Polynomial:
        if len(self) <= 1:
            return Polynomial()
        return Polynomial(self.coeffs[1:] * np.arange(1, len(self)))

    def compose_affine(self, a: float, b: float) -> Polynomial:
        """Return ``p(a*x + b)`` expanded in monomials of ``x``."""
        out = Polynomial()
        lin = Polynomial([b, a])
        # Horner in polynomial arithmetic
        for c in self.coeffs[::-1]:
            out = out * lin + Polynomial([c])
        return out

    def sum_terms(self, x) -> float:
        """Naive term-by-term sum, kept as an oracle for Horner."""
        return float(sum(a * x**i for i, a in enumerate(self.coeffs)))


def values(fam: Family, m_max: int, x) -> np.ndarray:
    """Evaluate orders ``0..m_max`` at ``x``; result has shape ``(m_max+1,) + x.shape``.

    The dtype follows ``x`` (floating types only), which is how the solver
    gets long-double basis values.
    """
    m_max = _check_order(m_max)
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(float)
    dt = x.dtype.type
    out = np.empty((m_max + 1,) + x.shape, dtype=x.dtype)
    out[0] = 1
    if m_max == 0:
        return out
    tag = fam.tag
    if tag == "chebyshev":
        out[1] = x
        for m in range(1, m_max):
            out[m + 1] = 2 * x * out[m] - out[m - 1]
    elif tag == "hermite":
        out[1] = 2 * x
        for m in range(1, m_max):
            out[m + 1] = 2 * x * out[m] - 2 * m * out[m - 1]
    elif tag == "laguerre":
        out[1] = 1 - x
        for m in range(1, m_max):
            out[m + 1] = ((2 * m + 1 - x) * out[m] - m * out[m - 1]) / dt(m + 1)
    elif tag == "legendre":
        out[1] = x
        for m in range(1, m_max):
            out[m + 1] = ((2 * m + 1) * x * out[m] - m * out[m - 1]) / dt(m + 1)
    else:
        a = dt(fam.alpha)
        out[1] = 2 * a * x
        for m in range(2, m_max + 1):
            out[m] = (2 * x * (m + a - 1) * out[m - 1] - (m + 2 * a - 2) * out[m - 2]) / dt(m)
    return out


def poly_value(fam: Family, m: int, x):
    """Value of the order-``m`` polynomial of ``fam`` at ``x`` by recurrence."""
    v = values(fam, m, x)[_check_order(m)]
    return v[()] if v.ndim == 0 else v


def poly_coeffs(fam: Family, m: int) -> Polynomial:
    """Monomial coefficients of the order-``m`` polynomial of ``fam``."""
    m = _check_order(m)
    x = np.array([0.0, 1.0])

    def shift(c):
        return np.concatenate(([0.0], c))

    def pad(c, n):
        return np.concatenate((c, np.zeros(n - len(c))))

    prev, cur = np.array([1.0]), None
    if m == 0:
        return Polynomial(prev)
    tag = fam.tag
    if tag == "chebyshev":
        cur = x.copy()
    elif tag == "hermite":
        cur = 2 * x
    elif tag == "laguerre":
        cur = np.array([1.0, -1.0])
    elif tag == "legendre":
        cur = x.copy()
    else:
        cur = 2 * fam.alpha * x
    for n in range(1, m):
        xc = shift(cur)
        p = pad(prev, len(xc))
        c = pad(cur, len(xc))
        if tag == "chebyshev":
            nxt = 2 * xc - p
        elif tag == "hermite":
            nxt = 2 * xc - 2 * n * p
        elif tag == "laguerre":
            nxt = ((2 * n + 1) * c - xc - n * p) / (n + 1)
        elif tag == "legendre":
            nxt = ((2 * n + 1) * xc - n * p) / (n + 1)
        else:
            a, k = fam.alpha, n + 1
            nxt = (2 * (k + a - 1) * xc - (k + 2 * a - 2) * p) / k
        prev, cur = cur, nxt
    return Polynomial(cur)


def weight(fam: Family, x):
    """Weight function of ``fam`` evaluated on the reference variable."""
    x = np.asarray(x, dtype=float)
    tag = fam.tag
    if tag == "legendre":
        return np.ones_like(x)
    if tag == "chebyshev":
        return 1.0 / np.sqrt(1.0 - x * x)
    if tag == "gegenbauer":
        return (1.0 - x * x) ** (fam.alpha - 0.5)
    if tag == "hermite":
        return np.exp(-x * x)
    return np.exp(-x)


def weight_moment(fam: Family, k: int) -> float:
    """``∫_{-1}^{1} x**k w(x) dx`` for the families orthogonal on [-1, 1]."""
    if fam.tag not in BOUNDED_FAMILIES:
        raise UnsupportedWeightError(
            f"{fam.tag} polynomials are orthogonal on an unbounded interval"
        )
    k = int(k)
    if k < 0:
        raise DomainError(f"moment exponent must be non-negative, got {k}")
    if k % 2:
        return 0.0
    if fam.tag == "legendre":
        return 2.0 / (k + 1)
    # Beta((k+1)/2, lam + 1/2) with lam = 0 for Chebyshev
    lam = 0.0 if fam.tag == "chebyshev" else fam.alpha
    a, b = 0.5 * (k + 1), lam + 0.5
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def norm_constant(fam: Family, m: int) -> float:
    """Factor making the order-``m`` wavelet orthonormal (dilation part excluded)."""
    m = _check_order(m)
    tag = fam.tag
    if tag == "chebyshev":
        return 1.0 / math.sqrt(math.pi) if m == 0 else math.sqrt(2.0 / math.pi)
    if tag == "hermite":
        return 1.0 / math.sqrt(math.factorial(m) * 2.0**m * math.sqrt(math.pi))
    if tag == "laguerre":
        return 1.0
    if tag == "legendre":
        return math.sqrt(m + 0.5)
    a = fam.alpha
    h = (
        math.pi
        * 2.0 ** (1 - 2 * a)
        * math.gamma(m + 2 * a)
        / (math.factorial(m) * (m + a) * math.gamma(a) ** 2)
    )
    return 1.0 / math.sqrt(h)
