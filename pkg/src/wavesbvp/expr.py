"""
Scalar expressions in ``t`` and ``y``.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := NUMBER | "t" | "y" | IDENT "(" expr ")" | "(" expr ")"

Evaluation is vectorised over numpy arrays and keeps the input dtype, so a
long-double ``y`` gives a long-double result.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationError, ExprSyntaxError

VARIABLES = ("t", "y")
FUNCTIONS = {
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
}
ALIASES = {"log": "ln"}

# precedence levels used when printing
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    arg: "Expr"

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"

    def __str__(self):
        return to_string(self)


Expr = Union[Num, Var, Neg, BinOp, Call]


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok):
        raise ExprSyntaxError(msg, _byte_offset(self.text, tok[2]))

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            self.fail(f"expected {value!r}, found {what}", tok)

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(f"unexpected {tok[1]!r}", tok)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.factor())
        return e

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return Num(float(value))
        if kind == "ident":
            if self.peek()[:2] == ("op", "("):
                name = ALIASES.get(value, value)
                if name not in FUNCTIONS:
                    self.fail(f"unknown function {value!r}", tok)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if value in VARIABLES:
                return Var(value)
            self.fail(f"unknown identifier {value!r}", tok)
        if (kind, value) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected {value!r}", tok)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


# -- printing ----------------------------------------------------------------

def _num_str(v: float) -> str:
    s = repr(float(v))
    return f"({s})" if v < 0 else s


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return 5


def to_string(e: Expr) -> str:
    """Render ``e`` so that :func:`parse` rebuilds an equivalent tree."""
    if isinstance(e, Num):
        return _num_str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.arg)
        # a power binds tighter than unary minus, anything else needs brackets
        if _prec(e.arg) < _PREC["^"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[e.op]
    left, right = to_string(e.left), to_string(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < p:
            right = f"({right})"
    else:
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
    return f"{left} {e.op} {right}"


# -- evaluation --------------------------------------------------------------

def _first_bad(mask) -> int | None:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return None
    return int(np.flatnonzero(mask.ravel())[0])


def _check(v, what):
    bad = ~np.isfinite(v)
    if np.any(bad):
        raise EvaluationError(f"{what} is not finite", _first_bad(bad))
    return v


def _eval(e: Expr, t, y):
    if isinstance(e, Num):
        # typed so that e.g. sqrt(2) is computed in the working precision
        return t.dtype.type(e.value)
    if isinstance(e, Var):
        return t if e.name == "t" else y
    if isinstance(e, Neg):
        return -_eval(e.arg, t, y)
    if isinstance(e, Call):
        a = _eval(e.arg, t, y)
        if e.func == "ln" and np.any(np.asarray(a) <= 0):
            raise EvaluationError("ln of a non-positive value", _first_bad(np.asarray(a) <= 0))
        if e.func == "sqrt" and np.any(np.asarray(a) < 0):
            raise EvaluationError("sqrt of a negative value", _first_bad(np.asarray(a) < 0))
        return _check(FUNCTIONS[e.func](a), f"{e.func}(...)")
    a = _eval(e.left, t, y)
    b = _eval(e.right, t, y)
    if e.op == "+":
        r = a + b
    elif e.op == "-":
        r = a - b
    elif e.op == "*":
        r = a * b
    elif e.op == "/":
        zero = np.asarray(b) == 0
        if np.any(zero):
            raise EvaluationError("division by zero", _first_bad(zero))
        r = a / b
    else:
        if isinstance(e.right, Num) and float(e.right.value).is_integer():
            r = np.power(a, int(e.right.value)) if e.right.value >= 0 else 1 / np.power(a, -int(e.right.value))
        else:
            r = np.power(a, b)
    return _check(r, f"'{e.op}' result")


def evaluate(e: Expr, t, y=0.0):
    """Evaluate ``e`` at ``(t, y)``; arrays broadcast elementwise."""
    with np.errstate(all="ignore"):
        t_arr, y_arr = np.asarray(t), np.asarray(y)
        if np.issubdtype(t_arr.dtype, np.floating) and np.issubdtype(y_arr.dtype, np.floating):
            dt = np.result_type(t_arr, y_arr)
        else:
            dt = np.result_type(t_arr, y_arr, float)
        t_arr, y_arr = np.broadcast_arrays(t_arr.astype(dt), y_arr.astype(dt))
        r = _eval(e, t_arr, y_arr)
        r = np.broadcast_to(np.asarray(r, dtype=dt), t_arr.shape)
        _check(r, "result")
        return r[()] if r.ndim == 0 else r.copy()


# -- differentiation ---------------------------------------------------------

def depends_on(e: Expr, name: str) -> bool:
    if isinstance(e, Var):
        return e.name == name
    if isinstance(e, Num):
        return False
    if isinstance(e, (Neg, Call)):
        return depends_on(e.arg, name)
    return depends_on(e.left, name) or depends_on(e.right, name)


def _is(e, v):
    return isinstance(e, Num) and e.value == v


def _neg(a):
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return Num(0.0)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return BinOp("*", a, b)


def _div(a, b):
    if _is(a, 0):
        return Num(0.0)
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(a.value / b.value)
    return BinOp("/", a, b)


def _pow(a, b):
    if _is(b, 0):
        return Num(1.0)
    if _is(b, 1):
        return a
    return BinOp("^", a, b)


def d_dy(e: Expr) -> Expr:
    """Symbolic partial derivative with respect to ``y``."""
    if not depends_on(e, "y"):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0)
    if isinstance(e, Neg):
        return _neg(d_dy(e.arg))
    if isinstance(e, Call):
        a, da = e.arg, d_dy(e.arg)
        if e.func == "exp":
            outer = e
        elif e.func == "ln":
            return _div(da, a)
        elif e.func == "sqrt":
            return _div(da, _mul(Num(2.0), e))
        elif e.func == "sin":
            outer = Call("cos", a)
        else:
            outer = _neg(Call("sin", a))
        return _mul(outer, da)
    a, b = e.left, e.right
    da, db = d_dy(a), d_dy(b)
    if e.op == "+":
        return _add(da, db)
    if e.op == "-":
        return _sub(da, db)
    if e.op == "*":
        return _add(_mul(da, b), _mul(a, db))
    if e.op == "/":
        return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, Num(2.0)))
    if not depends_on(b, "y"):
        # power rule, exponent constant in y
        if isinstance(b, Num):
            lowered = Num(b.value - 1)
        else:
            lowered = _sub(b, Num(1.0))
        return _mul(_mul(b, _pow(a, lowered)), da)
    # a^b = exp(b ln a)
    inner = _add(_mul(db, Call("ln", a)), _div(_mul(b, da), a))
    return _mul(e, inner)
