"""Scalar fields on R^4: a tiny expression language with exact second-order jets.

Fields are written over the coordinates x1..x4 using +, -, *, /, integer
powers and sin/cos/exp/log/sqrt.  Evaluation propagates (value, gradient,
Hessian) in a single forward pass, so all derivatives are exact calculus
derivatives up to floating-point rounding; no finite differencing is involved.

Grammar (whitespace insignificant, identifiers case-sensitive):

    expr   := term { ("+"|"-") term }
    term   := factor { ("*"|"/") factor }
    factor := ["-"] base [ "^" integer ]
    base   := number | "x1".."x4" | func "(" expr ")" | "(" expr ")"
    func   := "sin" | "cos" | "exp" | "log" | "sqrt"

Binary +, -, *, / are left-associative, "^" binds tighter than unary minus
and takes a (possibly signed) integer literal exponent.  Numbers are decimal
literals, optionally with an exponent part (e.g. ``2.5e-3``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "BinOp",
    "Call",
    "Const",
    "DomainError",
    "FieldJet",
    "Neg",
    "ParseError",
    "Pow",
    "ScalarField",
    "Var",
    "as_point",
    "eval_jet",
    "parse",
    "unparse",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
VARIABLES = ("x1", "x2", "x3", "x4")


class ParseError(ValueError):
    """Source text does not match the grammar; `offset` is a byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class DomainError(ValueError):
    """Evaluation left the mathematical domain of a subexpression."""

    def __init__(self, message: str, subexpression: str):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1..4


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of "+", "-", "*", "/"
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Pow, Call]


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_NUM, _IDENT, _OP, _LPAREN, _RPAREN, _EOF = range(6)


def _tokenize(src: str) -> list[tuple[int, str, int]]:
    toks = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*/^":
            toks.append((_OP, ch, i))
            i += 1
        elif ch == "(":
            toks.append((_LPAREN, ch, i))
            i += 1
        elif ch == ")":
            toks.append((_RPAREN, ch, i))
            i += 1
        elif ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            toks.append((_NUM, src[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append((_IDENT, src[i:j], i))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    toks.append((_EOF, "", n))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != _EOF:
            raise ParseError(f"unexpected {text!r} after expression", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == _OP and text in "*/":
                self.advance()
                node = BinOp(text, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, text, _ = self.peek()
        negate = False
        if kind == _OP and text == "-":
            self.advance()
            negate = True
        node = self.base()
        kind, text, _ = self.peek()
        if kind == _OP and text == "^":
            self.advance()
            node = Pow(node, self.integer())
        return Neg(node) if negate else node

    def integer(self) -> int:
        kind, text, off = self.peek()
        sign = 1
        if kind == _OP and text == "-":
            self.advance()
            sign = -1
            kind, text, off = self.peek()
        if kind != _NUM:
            raise ParseError("expected an integer exponent", off)
        self.advance()
        if any(c in text for c in ".eE"):
            raise ParseError(f"non-integer exponent {text!r}", off)
        return sign * int(text)

    def base(self) -> Node:
        kind, text, off = self.advance()
        if kind == _NUM:
            value = float(text)
            if not math.isfinite(value):
                raise ParseError(f"number literal {text!r} overflows", off)
            return Const(value)
        if kind == _IDENT:
            if text in VARIABLES:
                return Var(int(text[1]))
            if text in FUNCTIONS:
                kind, _, off = self.advance()
                if kind != _LPAREN:
                    raise ParseError(f"expected '(' after {text}", off)
                arg = self.expr()
                kind, _, off = self.advance()
                if kind != _RPAREN:
                    raise ParseError("expected ')'", off)
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", off)
        if kind == _LPAREN:
            node = self.expr()
            kind, _, off = self.advance()
            if kind != _RPAREN:
                raise ParseError("expected ')'", off)
            return node
        raise ParseError("expected a number, coordinate, function or '('", off)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node: Node) -> int:
    match node:
        case BinOp(op="+") | BinOp(op="-"):
            return _PREC_ADD
        case BinOp():
            return _PREC_MUL
        case Neg():
            return _PREC_NEG
        case Pow():
            return _PREC_POW
        case _:
            return _PREC_ATOM


def _wrap(node: Node, minprec: int) -> str:
    text = unparse(node)
    return f"({text})" if _prec(node) < minprec else text


def unparse(node: Node) -> str:
    """Render an AST to source that re-parses to a structurally equal tree."""
    match node:
        case Const(value=v):
            return repr(v)
        case Var(index=i):
            return f"x{i}"
        case Neg(operand=child):
            # The grammar allows a single leading minus per factor, so a
            # nested negation needs parentheses.
            return "-" + _wrap(child, _PREC_NEG + 1)
        case BinOp(op=op, left=left, right=right):
            prec = _prec(node)
            return f"{_wrap(left, prec)} {op} {_wrap(right, prec + 1)}"
        case Pow(base=base, exponent=e):
            return f"{_wrap(base, _PREC_ATOM)}^{e}"
        case Call(func=f, arg=arg):
            return f"{f}({unparse(arg)})"
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Second-order jets
# ---------------------------------------------------------------------------

# Packed upper-triangle layout for symmetric 4x4 Hessians.
_PI = np.array([0, 0, 0, 0, 1, 1, 1, 2, 2, 3])
_PJ = np.array([0, 1, 2, 3, 1, 2, 3, 2, 3, 3])
_Z4 = np.zeros(4)
_Z4.setflags(write=False)
_Z10 = np.zeros(10)
_Z10.setflags(write=False)


def _sym_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Packed a_i b_j + a_j b_i (product-rule cross term)."""
    return a[_PI] * b[_PJ] + a[_PJ] * b[_PI]


def _outer_self(a: np.ndarray) -> np.ndarray:
    """Packed a_i a_j (chain-rule term; diagonal not doubled)."""
    return a[_PI] * a[_PJ]


@dataclass(frozen=True)
class FieldJet:
    """Value, gradient and Hessian of a scalar field at a point.

    The Hessian is stored as its 10 upper-triangle entries, so symmetry is
    exact by construction; `hess` assembles the full 4x4 matrix on demand.
    """

    value: float
    grad: np.ndarray
    hess_packed: np.ndarray

    @property
    def hess(self) -> np.ndarray:
        h = np.empty((4, 4))
        h[_PI, _PJ] = self.hess_packed
        h[_PJ, _PI] = self.hess_packed
        return h

    def __add__(self, other: "FieldJet") -> "FieldJet":
        return FieldJet(
            self.value + other.value,
            self.grad + other.grad,
            self.hess_packed + other.hess_packed,
        )

    def __sub__(self, other: "FieldJet") -> "FieldJet":
        return FieldJet(
            self.value - other.value,
            self.grad - other.grad,
            self.hess_packed - other.hess_packed,
        )

    def __neg__(self) -> "FieldJet":
        return FieldJet(-self.value, -self.grad, -self.hess_packed)

    def __mul__(self, other: "FieldJet") -> "FieldJet":
        return FieldJet(
            self.value * other.value,
            self.value * other.grad + other.value * self.grad,
            self.value * other.hess_packed
            + other.value * self.hess_packed
            + _sym_outer(self.grad, other.grad),
        )

    def __truediv__(self, other: "FieldJet") -> "FieldJet":
        # Caller guards other.value != 0.
        v = self.value / other.value
        g = (self.grad - v * other.grad) / other.value
        h = (
            self.hess_packed - _sym_outer(g, other.grad) - v * other.hess_packed
        ) / other.value
        return FieldJet(v, g, h)


def _compose(j: FieldJet, u: float, du: float, ddu: float) -> FieldJet:
    """Chain rule for a scalar function applied on top of a jet."""
    return FieldJet(
        u, du * j.grad, ddu * _outer_self(j.grad) + du * j.hess_packed
    )


def _pow_jet(j: FieldJet, n: int) -> FieldJet:
    if n == 0:
        return FieldJet(1.0, _Z4, _Z10)
    if n == 1:
        return j
    v = j.value
    c1 = n * v ** (n - 1)
    c2 = n * (n - 1) * v ** (n - 2)
    return FieldJet(
        v**n, c1 * j.grad, c2 * _outer_self(j.grad) + c1 * j.hess_packed
    )


def _eval(node: Node, x: np.ndarray) -> FieldJet:
    match node:
        case Const(value=v):
            return FieldJet(v, _Z4, _Z10)
        case Var(index=i):
            g = np.zeros(4)
            g[i - 1] = 1.0
            return FieldJet(float(x[i - 1]), g, _Z10)
        case Neg(operand=child):
            return -_eval(child, x)
        case BinOp(op="+", left=left, right=right):
            return _eval(left, x) + _eval(right, x)
        case BinOp(op="-", left=left, right=right):
            return _eval(left, x) - _eval(right, x)
        case BinOp(op="*", left=left, right=right):
            return _eval(left, x) * _eval(right, x)
        case BinOp(op="/", left=left, right=right):
            jr = _eval(right, x)
            if jr.value == 0.0:
                raise DomainError("division by zero", unparse(node))
            return _eval(left, x) / jr
        case Pow(base=base, exponent=e):
            jb = _eval(base, x)
            if jb.value == 0.0 and e < 0:
                raise DomainError("zero raised to a negative power", unparse(node))
            return _pow_jet(jb, e)
        case Call(func=f, arg=arg):
            ja = _eval(arg, x)
            if f == "sin":
                s, c = math.sin(ja.value), math.cos(ja.value)
                return _compose(ja, s, c, -s)
            if f == "cos":
                s, c = math.sin(ja.value), math.cos(ja.value)
                return _compose(ja, c, -s, -c)
            if f == "exp":
                e = math.exp(ja.value)
                return _compose(ja, e, e, e)
            if f == "log":
                if ja.value <= 0.0:
                    raise DomainError(
                        f"log of non-positive value {ja.value!r}", unparse(node)
                    )
                return _compose(
                    ja, math.log(ja.value), 1.0 / ja.value, -1.0 / ja.value**2
                )
            if f == "sqrt":
                if ja.value <= 0.0:
                    raise DomainError(
                        f"sqrt of non-positive value {ja.value!r}", unparse(node)
                    )
                r = math.sqrt(ja.value)
                return _compose(ja, r, 0.5 / r, -0.25 / (r * ja.value))
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Public surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarField:
    """A parsed expression over x1..x4, evaluable to a second-order jet."""

    ast: Node
    source: str

    def jet(self, point) -> FieldJet:
        return eval_jet(self, point)

    def __call__(self, point) -> float:
        return eval_jet(self, point).value

    def __str__(self) -> str:
        return unparse(self.ast)


def parse(source: str) -> ScalarField:
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    return ScalarField(_Parser(source).parse(), source)


def as_point(p) -> np.ndarray:
    """Coerce to a finite 4-coordinate point."""
    x = np.asarray(p, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"a point needs exactly 4 coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"point coordinates must be finite, got {x.tolist()}")
    return x


def eval_jet(field: ScalarField | Node, point) -> FieldJet:
    """Evaluate value, gradient and Hessian of a field at a point."""
    x = as_point(point)
    node = field.ast if isinstance(field, ScalarField) else field
    return _eval(node, x)
