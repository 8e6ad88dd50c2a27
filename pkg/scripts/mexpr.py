"""
Meromorphic expressions in one complex variable z.

Grammar (whitespace ignored)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := atom ("^" exponent)?
    exponent := ["-" | "+"] NUMBER | "(" ["-" | "+"] NUMBER ")"
    atom     := NUMBER | "z" | "i" | ("exp" | "log") "(" expr ")" | "(" expr ")"
    NUMBER   := digits ["." digits] [("e" | "E") ["+" | "-"] digits] ["i"]

A trailing ``i`` makes a literal imaginary (``2i``, ``1.5i``). Exponents must be
real literals; ``z^2`` keeps an integer exponent, ``z^2.5`` is the principal
branch.
"""
from __future__ import annotations

import cmath
import re
from dataclasses import dataclass

import numpy as np

from scripts.errors import ExprSyntaxError, PoleSignal

POLE_THRESHOLD = 1e-13


class MeroExpr:
    """Base node. Subclasses are frozen dataclasses, so trees are immutable and hashable."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __call__(self, z):
        return eval_expr(self, z)


@dataclass(frozen=True)
class Const(MeroExpr):
    value: complex

    def __str__(self):
        return _format_complex(complex(self.value))


@dataclass(frozen=True)
class Var(MeroExpr):
    def __str__(self):
        return "z"


@dataclass(frozen=True)
class Add(MeroExpr):
    left: MeroExpr
    right: MeroExpr

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True)
class Sub(MeroExpr):
    left: MeroExpr
    right: MeroExpr

    def __str__(self):
        return f"({self.left} - {self.right})"


@dataclass(frozen=True)
class Mul(MeroExpr):
    left: MeroExpr
    right: MeroExpr

    def __str__(self):
        return f"({self.left}*{self.right})"


@dataclass(frozen=True)
class Div(MeroExpr):
    left: MeroExpr
    right: MeroExpr

    def __str__(self):
        return f"({self.left}/{self.right})"


@dataclass(frozen=True)
class Neg(MeroExpr):
    arg: MeroExpr

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True)
class Pow(MeroExpr):
    base: MeroExpr
    exponent: float

    def __str__(self):
        exp_text = repr(self.exponent)
        if self.exponent < 0:
            exp_text = f"({exp_text})"
        base_text = str(self.base)
        if isinstance(self.base, Const) and not base_text.startswith("("):
            base_text = f"({base_text})"
        return f"{base_text}^{exp_text}"


@dataclass(frozen=True)
class Exp(MeroExpr):
    arg: MeroExpr

    def __str__(self):
        return f"exp({self.arg})"


@dataclass(frozen=True)
class Log(MeroExpr):
    arg: MeroExpr

    def __str__(self):
        return f"log({self.arg})"


Z = Var()
ZERO = Const(0j)
ONE = Const(1 + 0j)


def _format_complex(value):
    re_, im_ = value.real, value.imag
    if im_ == 0:
        text = repr(re_)
        return f"({text})" if re_ < 0 or text.startswith("-") else text
    if re_ == 0:
        text = f"{repr(im_)}i"
        return f"({text})" if im_ < 0 else text
    sign = "-" if im_ < 0 else "+"
    return f"({repr(re_)}{sign}{repr(abs(im_))}i)"


def _normalize_exponent(exponent):
    if isinstance(exponent, bool) or not isinstance(exponent, (int, float, np.integer, np.floating)):
        raise TypeError(f"exponent must be a real number, got {exponent!r}")
    exponent = float(exponent)
    if exponent.is_integer():
        return int(exponent)
    return exponent


def as_expr(value):
    if isinstance(value, MeroExpr):
        return value
    if isinstance(value, (int, float, complex, np.number)):
        return Const(complex(value))
    raise TypeError(f"cannot convert {value!r} to an expression")


def is_const(e, value=None):
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# Constructors with light constant folding; no general simplification.

def add(a, b):
    if is_const(a) and is_const(b):
        return Const(a.value + b.value)
    if is_const(a, 0):
        return b
    if is_const(b, 0):
        return a
    return Add(a, b)


def sub(a, b):
    if is_const(a) and is_const(b):
        return Const(a.value - b.value)
    if is_const(b, 0):
        return a
    if is_const(a, 0):
        return neg(b)
    return Sub(a, b)


def mul(a, b):
    if is_const(a) and is_const(b):
        return Const(a.value * b.value)
    if is_const(a, 0) or is_const(b, 0):
        return ZERO
    if is_const(a, 1):
        return b
    if is_const(b, 1):
        return a
    return Mul(a, b)


def div(a, b):
    if is_const(b, 1):
        return a
    if is_const(a) and is_const(b) and b.value != 0:
        return Const(a.value / b.value)
    if is_const(a, 0) and not is_const(b, 0):
        return ZERO
    return Div(a, b)


def neg(a):
    if is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(base, exponent):
    exponent = _normalize_exponent(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if is_const(base) and (base.value != 0 or exponent > 0):
        return Const(complex(base.value) ** exponent)
    return Pow(base, exponent)


def exp(a):
    if is_const(a):
        return Const(cmath.exp(a.value))
    return Exp(a)


def log(a):
    if is_const(a) and a.value != 0:
        return Const(cmath.log(a.value))
    return Log(a)


def reciprocal(e):
    """1/e, flipping quotients (also inside products and powers) so poles of e become plain zeros."""
    if isinstance(e, Div):
        return div(e.right, e.left)
    if isinstance(e, Neg):
        return neg(reciprocal(e.arg))
    if isinstance(e, Mul):
        return mul(reciprocal(e.left), reciprocal(e.right))
    if isinstance(e, Pow):
        if isinstance(e.base, (Div, Mul)):
            return power(reciprocal(e.base), e.exponent)
        return power(e.base, -e.exponent)
    if is_const(e) and e.value != 0:
        return Const(1 / e.value)
    return div(ONE, e)


def substitute(e, replacement):
    """Replace the variable z by the expression ``replacement``."""
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return add(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Sub):
        return sub(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Mul):
        return mul(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Div):
        return div(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Neg):
        return neg(substitute(e.arg, replacement))
    if isinstance(e, Pow):
        return power(substitute(e.base, replacement), e.exponent)
    if isinstance(e, Exp):
        return exp(substitute(e.arg, replacement))
    if isinstance(e, Log):
        return log(substitute(e.arg, replacement))
    raise TypeError(f"unknown node {type(e).__name__}")


def diff_expr(e):
    """Exact symbolic derivative d/dz."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return add(diff_expr(e.left), diff_expr(e.right))
    if isinstance(e, Sub):
        return sub(diff_expr(e.left), diff_expr(e.right))
    if isinstance(e, Neg):
        return neg(diff_expr(e.arg))
    if isinstance(e, Mul):
        return add(mul(diff_expr(e.left), e.right), mul(e.left, diff_expr(e.right)))
    if isinstance(e, Div):
        numerator = sub(mul(diff_expr(e.left), e.right), mul(e.left, diff_expr(e.right)))
        return div(numerator, power(e.right, 2))
    if isinstance(e, Pow):
        return mul(mul(Const(complex(e.exponent)), power(e.base, e.exponent - 1)), diff_expr(e.base))
    if isinstance(e, Exp):
        return mul(e, diff_expr(e.arg))
    if isinstance(e, Log):
        return div(diff_expr(e.arg), e.arg)
    raise TypeError(f"unknown node {type(e).__name__}")


# Evaluation ------------------------------------------------------------------

def eval_expr(e, z, strict=True, threshold=POLE_THRESHOLD):
    """
    Value of ``e`` at ``z`` (a complex number or an array of them).

    With ``strict`` a near-zero denominator, a negative power of a near-zero base
    or log at 0 raises PoleSignal. Without it numpy arithmetic runs unchecked and
    poles come out as inf/nan.
    """
    if not strict or isinstance(z, np.ndarray):
        zz = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            value = _eval_array(e, zz, strict, threshold)
        value = np.broadcast_to(value, zz.shape)
        if zz.ndim == 0:
            return complex(value)
        return np.array(value, dtype=complex)
    return _eval_scalar(e, complex(z), threshold)


def _eval_scalar(e, z, threshold):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return z
    if isinstance(e, Add):
        return _eval_scalar(e.left, z, threshold) + _eval_scalar(e.right, z, threshold)
    if isinstance(e, Sub):
        return _eval_scalar(e.left, z, threshold) - _eval_scalar(e.right, z, threshold)
    if isinstance(e, Mul):
        return _eval_scalar(e.left, z, threshold) * _eval_scalar(e.right, z, threshold)
    if isinstance(e, Div):
        num = _eval_scalar(e.left, z, threshold)
        den = _eval_scalar(e.right, z, threshold)
        if abs(den) < threshold * (1 + abs(num)):
            raise PoleSignal(z)
        return num / den
    if isinstance(e, Neg):
        return -_eval_scalar(e.arg, z, threshold)
    if isinstance(e, Pow):
        base = _eval_scalar(e.base, z, threshold)
        if e.exponent < 0:
            den = base ** (-e.exponent) if base != 0 else 0j
            if abs(den) < 2 * threshold:
                raise PoleSignal(z)
            return 1 / den
        if base == 0:
            return 0j
        return base ** e.exponent
    if isinstance(e, Exp):
        return cmath.exp(_eval_scalar(e.arg, z, threshold))
    if isinstance(e, Log):
        arg = _eval_scalar(e.arg, z, threshold)
        if abs(arg) < threshold:
            raise PoleSignal(z, "log of zero")
        return cmath.log(arg)
    raise TypeError(f"unknown node {type(e).__name__}")


def _raise_at(z, mask, message="pole encountered"):
    zz, mm = np.broadcast_arrays(z, mask)
    raise PoleSignal(complex(zz[mm].flat[0]), message)


def _eval_array(e, z, strict, threshold):
    if isinstance(e, Const):
        return np.complex128(e.value)
    if isinstance(e, Var):
        return z
    if isinstance(e, Add):
        return _eval_array(e.left, z, strict, threshold) + _eval_array(e.right, z, strict, threshold)
    if isinstance(e, Sub):
        return _eval_array(e.left, z, strict, threshold) - _eval_array(e.right, z, strict, threshold)
    if isinstance(e, Mul):
        return _eval_array(e.left, z, strict, threshold) * _eval_array(e.right, z, strict, threshold)
    if isinstance(e, Div):
        num = _eval_array(e.left, z, strict, threshold)
        den = _eval_array(e.right, z, strict, threshold)
        if strict:
            mask = np.abs(den) < threshold * (1 + np.abs(num))
            if np.any(mask):
                _raise_at(z, mask)
        return num / den
    if isinstance(e, Neg):
        return -_eval_array(e.arg, z, strict, threshold)
    if isinstance(e, Pow):
        base = _eval_array(e.base, z, strict, threshold)
        if e.exponent < 0:
            den = np.power(base, -e.exponent)
            if strict:
                mask = np.abs(den) < 2 * threshold
                if np.any(mask):
                    _raise_at(z, mask)
            return 1 / den
        return np.power(base, e.exponent)
    if isinstance(e, Exp):
        return np.exp(_eval_array(e.arg, z, strict, threshold))
    if isinstance(e, Log):
        arg = _eval_array(e.arg, z, strict, threshold)
        if strict:
            mask = np.abs(arg) < threshold
            if np.any(mask):
                _raise_at(z, mask, "log of zero")
        return np.log(arg)
    raise TypeError(f"unknown node {type(e).__name__}")


# Parsing ---------------------------------------------------------------------

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?(i(?![A-Za-z0-9_]))?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_FUNCTIONS = {"exp": exp, "log": log}


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int
    value: complex = 0j


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        match = _NUMBER.match(text, pos)
        if match:
            magnitude = float(match.group(1) + (match.group(2) or ""))
            value = complex(0, magnitude) if match.group(3) else complex(magnitude, 0)
            tokens.append(_Token("num", match.group(0), pos, value))
            pos = match.end()
            continue
        match = _IDENT.match(text, pos)
        if match:
            tokens.append(_Token("ident", match.group(0), pos))
            pos = match.end()
            continue
        if ch in "+-*/^()":
            tokens.append(_Token("op", ch, pos))
            pos += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, text):
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text):
        token = self.accept(text)
        if token is None:
            self.fail(f"expected {text!r}")
        return token

    def fail(self, message):
        token = self.current
        if token.kind == "end":
            raise ExprSyntaxError(f"{message}, found end of input", token.pos)
        raise ExprSyntaxError(f"{message}, found {token.text!r}", token.pos)

    def parse(self):
        tree = self.expr()
        if self.current.kind != "end":
            self.fail("unexpected token")
        return tree

    def expr(self):
        node = self.term()
        while True:
            if self.accept("+"):
                node = add(node, self.term())
            elif self.accept("-"):
                node = sub(node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            if self.accept("*"):
                node = mul(node, self.unary())
            elif self.accept("/"):
                node = Div(node, self.unary())
            else:
                return node

    def unary(self):
        if self.accept("-"):
            return neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            exponent = self.exponent()
            if self.current.kind == "op" and self.current.text == "^":
                self.fail("exponent must be an integer or real literal")
            return power(base, exponent)
        return base

    def exponent(self):
        wrapped = self.accept("(") is not None
        sign = 1.0
        if self.accept("-"):
            sign = -1.0
        elif self.accept("+"):
            pass
        token = self.current
        if token.kind != "num" or token.value.imag != 0:
            self.fail("exponent must be an integer or real literal")
        self.advance()
        if wrapped:
            self.expect(")")
        return sign * token.value.real

    def atom(self):
        token = self.current
        if token.kind == "num":
            self.advance()
            return Const(token.value)
        if token.kind == "ident":
            self.advance()
            if token.text == "z":
                return Z
            if token.text == "i":
                return Const(1j)
            if token.text in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCTIONS[token.text](arg)
            raise ExprSyntaxError(f"unknown name {token.text!r}", token.pos)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected a number, z, a function or '('")


def parse_expr(text):
    """Parse a grammar string into a MeroExpr."""
    if not isinstance(text, str):
        raise ExprSyntaxError(f"expression must be a string, got {type(text).__name__}", 0)
    return _Parser(text).parse()
