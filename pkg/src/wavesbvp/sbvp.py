"""
Singular two-point boundary value problems

    y'' + (k/t) y' + f(t, y) = 0,   0 < t <= 1,

with either value conditions at both ends or ``y'(0) = alpha`` together with
a Robin condition ``a y(1) + b y'(1) = beta`` at the right end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import expr as ex
from .errors import DomainError, SchemaError, UnknownProblemError


@dataclass(frozen=True)
class Dirichlet:
    """``y(0) = alpha``, ``y(1) = beta``."""

    alpha: float
    beta: float

    def to_json(self) -> dict:
        return {"type": "dirichlet", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Robin:
    """``y'(0) = alpha``, ``a y(1) + b y'(1) = beta``."""

    alpha: float
    a: float
    b: float
    beta: float

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("Robin condition needs a != 0")

    def to_json(self) -> dict:
        return {"type": "robin", "alpha": self.alpha, "a": self.a, "b": self.b, "beta": self.beta}


BoundaryCondition = Union[Dirichlet, Robin]
Function = Union[ex.Expr, Callable]


def _call(fn: Function, t, y=0.0):
    if isinstance(fn, (ex.Num, ex.Var, ex.Neg, ex.BinOp, ex.Call)):
        return ex.evaluate(fn, t, y)
    return fn(t, y)


@dataclass(frozen=True)
class Problem:
    name: str
    k: float
    f: Function
    f_y: Function
    bc: BoundaryCondition
    exact: Function | None = None
    guess: float = 0.0
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if not (self.k >= 0 and math.isfinite(self.k)):
            raise DomainError(f"singularity coefficient k must be finite and >= 0, got {self.k}")

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def f_value(self, t, y):
        return _call(self.f, t, y)

    def fy_value(self, t, y):
        return _call(self.f_y, t, y)

    def exact_value(self, t):
        if self.exact is None:
            raise DomainError(f"problem {self.name!r} has no exact solution")
        return _call(self.exact, t, np.zeros_like(np.asarray(t, dtype=float)))

    def to_json(self) -> dict:
        doc = {"name": self.name, "k": self.k, "f": str(self.f), "bc": self.bc.to_json()}
        if self.exact is not None:
            doc["exact"] = str(self.exact)
        return doc


def make_problem(name, k, f, bc, exact=None, guess=0.0, description="") -> Problem:
    """Build a problem from expression strings; ``f_y`` is derived symbolically."""
    fe = ex.parse(f) if isinstance(f, str) else f
    exact_e = ex.parse(exact) if isinstance(exact, str) else exact
    return Problem(name, float(k), fe, ex.d_dy(fe), bc, exact_e, float(guess), description)


_EXAMPLE2_EXACT = "2*ln((4-2*sqrt(2))/((3-2*sqrt(2))*t^2+1))"

_BUILTINS = {
    "example1": dict(
        k=2,
        f="y^5",
        bc=Robin(0.0, 1.0, 0.0, math.sqrt(3.0) / 2),
        exact="sqrt(3/(3+t^2))",
        guess=math.sqrt(0.75),
        description="stellar structure (Lane-Emden, index 5)",
    ),
    "example2": dict(
        k=1,
        f="exp(y)",
        bc=Robin(0.0, 1.0, 0.0, 0.0),
        exact=_EXAMPLE2_EXACT,
        guess=0.0,
        description="thermal explosion in a cylindrical vessel",
    ),
    "example3": dict(
        k=3,
        f="1/(8*y^2) - 1/2",
        bc=Robin(0.0, 1.0, 0.0, 1.0),
        guess=1.0,
        description="rotationally symmetric shallow membrane cap",
    ),
    "example4": dict(
        k=2,
        f="exp(-y)",
        bc=Robin(0.0, 2.0, 1.0, 0.0),
        guess=0.0,
        description="heat conduction in the human head",
    ),
    "manufactured": dict(
        k=2,
        f="6",
        bc=Dirichlet(1.0, 0.0),
        exact="1 - t^2",
        guess=0.0,
        description="linear problem with polynomial solution 1 - t^2",
    ),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> Problem:
    spec = _BUILTINS.get(name)
    if spec is None:
        raise UnknownProblemError(
            f"unknown builtin problem {name!r} (choose from {', '.join(BUILTIN_NAMES)})"
        )
    return make_problem(name, **spec)


def _number(doc, key, where):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}.{key} must be a finite number")
    return float(v)


def _parse_bc(doc) -> BoundaryCondition:
    if not isinstance(doc, dict):
        raise SchemaError("bc must be an object")
    kind = doc.get("type")
    if kind == "dirichlet":
        keys = {"type", "alpha", "beta"}
    elif kind == "robin":
        keys = {"type", "alpha", "a", "b", "beta"}
    else:
        raise SchemaError("bc.type must be 'dirichlet' or 'robin'")
    extra = set(doc) - keys
    if extra:
        raise SchemaError(f"unexpected bc fields: {sorted(extra)}")
    vals = {k: _number(doc, k, "bc") for k in keys - {"type"}}
    if kind == "dirichlet":
        return Dirichlet(vals["alpha"], vals["beta"])
    if vals["a"] == 0:
        raise SchemaError("bc.a must be non-zero for a robin condition")
    return Robin(vals["alpha"], vals["a"], vals["b"], vals["beta"])


_TOP_KEYS = {"k", "f", "bc", "exact", "name", "guess"}


def from_json(document) -> Problem:
    """Problem from a JSON document (bytes, str or an already decoded dict)."""
    if isinstance(document, (bytes, bytearray, str)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}") from e
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("problem document must be a JSON object")
    for key in ("k", "f", "bc"):
        if key not in doc:
            raise SchemaError(f"missing required field {key!r}")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise SchemaError(f"unexpected fields: {sorted(extra)}")
    k = _number(doc, "k", "problem")
    if k < 0:
        raise SchemaError("k must be >= 0")
    if not isinstance(doc["f"], str):
        raise SchemaError("f must be an expression string")
    bc = _parse_bc(doc["bc"])
    f = ex.parse(doc["f"])
    exact = None
    if doc.get("exact") is not None:
        if not isinstance(doc["exact"], str):
            raise SchemaError("exact must be an expression string")
        exact = ex.parse(doc["exact"])
        if ex.depends_on(exact, "y"):
            raise SchemaError("exact solution may only depend on t")
    name = doc.get("name", "custom")
    if not isinstance(name, str):
        raise SchemaError("name must be a string")
    guess = _number(doc, "guess", "problem") if "guess" in doc else 0.0
    return make_problem(name, k, f, bc, exact, guess)


def load(source: str) -> Problem:
    """Builtin name or path to a JSON problem file."""
    if source in _BUILTINS:
        return builtin(source)
    with open(source, "rb") as fh:
        return from_json(fh.read())


__all__ = [
    "Dirichlet",
    "Robin",
    "Problem",
    "BoundaryCondition",
    "builtin",
    "from_json",
    "make_problem",
    "load",
    "BUILTIN_NAMES",
]
