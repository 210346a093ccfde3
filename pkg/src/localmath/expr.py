"""A small expression language for scalar fields, with symbolic derivatives.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | atom ['^' signed-number]
    atom   := number | variable | func '(' args ')' | '(' expr ')'

Functions are ``exp``, ``sin``, ``cos`` (one argument) and
``gaussian(center, width)`` or ``gaussian(c_0, ..., c_{n-1}, width)`` whose
arguments must be numeric constants.  ``gaussian`` is the isotropic bump
``exp(-|v - c|^2 / (2 width^2))`` over all variables ``v``.

Trees evaluate with numpy broadcasting: pass one array per variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

COORDS = ("y0", "y1", "y2", "y3")

_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


class ParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class Node:
    def evaluate(self, env: Sequence):
        raise NotImplementedError

    def diff(self, i: int) -> "Node":
        raise NotImplementedError

    def __call__(self, *env):
        return self.evaluate(env)

    def __str__(self):
        return self.text()


@dataclass(frozen=True)
class Const(Node):
    value: float

    def evaluate(self, env):
        return self.value

    def diff(self, i):
        return ZERO

    def text(self):
        r = repr(float(self.value))
        return f"({r})" if self.value < 0 else r


@dataclass(frozen=True)
class Var(Node):
    index: int
    name: str

    def evaluate(self, env):
        return env[self.index]

    def diff(self, i):
        return ONE if i == self.index else ZERO

    def text(self):
        return self.name


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def evaluate(self, env):
        return -self.arg.evaluate(env)

    def diff(self, i):
        return neg(self.arg.diff(i))

    def text(self):
        return f"(-{self.arg.text()})"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        return np.divide(a, b)

    def diff(self, i):
        a, b = self.left, self.right
        da, db = a.diff(i), b.diff(i)
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        # (a/b)' = a'/b - a b' / b^2
        return sub(div(da, b), div(mul(a, db), power(b, 2.0)))

    def text(self):
        return f"({self.left.text()} {self.op} {self.right.text()})"


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: float

    def evaluate(self, env):
        return np.power(self.base.evaluate(env), self.exponent)

    def diff(self, i):
        db = self.base.diff(i)
        if db == ZERO:
            return ZERO
        return mul(mul(Const(self.exponent), power(self.base, self.exponent - 1.0)), db)

    def text(self):
        return f"({self.base.text()}^{float(self.exponent)!r})"


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node

    def evaluate(self, env):
        return _FUNCS[self.name](self.arg.evaluate(env))

    def diff(self, i):
        da = self.arg.diff(i)
        if da == ZERO:
            return ZERO
        if self.name == "exp":
            outer = self
        elif self.name == "sin":
            outer = Func("cos", self.arg)
        else:
            outer = neg(Func("sin", self.arg))
        return mul(outer, da)

    def text(self):
        return f"{self.name}({self.arg.text()})"


@dataclass(frozen=True)
class Gaussian(Node):
    centers: Tuple[float, ...]
    width: float
    names: Tuple[str, ...]

    def evaluate(self, env):
        r2 = 0.0
        for c, v in zip(self.centers, env):
            r2 = r2 + (v - c) ** 2
        return np.exp(-r2 / (2.0 * self.width ** 2))

    def diff(self, i):
        if i >= len(self.centers):
            return ZERO
        shift = sub(Var(i, self.names[i]), Const(self.centers[i]))
        return mul(Const(-1.0 / self.width ** 2), mul(shift, self))

    def text(self):
        args = ", ".join(repr(float(c)) for c in self.centers)
        return f"gaussian({args}, {float(self.width)!r})"


ZERO = Const(0.0)
ONE = Const(1.0)


def _const(n):
    return isinstance(n, Const)


def neg(a):
    if _const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a, b):
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    if _const(a) and _const(b):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def sub(a, b):
    if b == ZERO:
        return a
    if a == ZERO:
        return neg(b)
    if _const(a) and _const(b):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def mul(a, b):
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if _const(a) and _const(b):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def div(a, b):
    if a == ZERO:
        return ZERO
    if b == ONE:
        return a
    return BinOp("/", a, b)


def power(a, n):
    n = float(n)
    if n == 0.0:
        return ONE
    if n == 1.0:
        return a
    if _const(a):
        return Const(a.value ** n)
    return Pow(a, n)


def gradient(node: Node, nvars: int = 4) -> Tuple[Node, ...]:
    return tuple(node.diff(i) for i in range(nvars))


def evaluate_on(node: Node, points) -> np.ndarray:
    """Evaluate on an array of points with shape ``(..., nvars)``."""
    pts = np.asarray(points, dtype=float)
    env = [pts[..., k] for k in range(pts.shape[-1])]
    out = node.evaluate(env)
    return np.broadcast_to(np.asarray(out, dtype=float), pts.shape[:-1]).copy()


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text):
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text, variables):
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def take(self, text=None):
        tok = self.tok
        if text is not None and tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self):
        if self.tok.kind == "end":
            self.fail("empty expression")
        node = self.expr()
        if self.tok.kind != "end":
            if self.tok.text == ")":
                self.fail("unbalanced parentheses: unexpected ')'")
            self.fail(f"unexpected token {self.tok.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            node = BinOp(op, node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            rhs = self.factor()
            node = BinOp(op, node, rhs)
        return node

    def factor(self):
        if self.tok.text == "-":
            self.take()
            return Neg(self.factor())
        if self.tok.text == "+":
            self.take()
            return self.factor()
        node = self.atom()
        if self.tok.text == "^":
            self.take()
            node = Pow(node, self.signed_number())
        return node

    def signed_number(self):
        sign = 1.0
        while self.tok.text in ("-", "+"):
            if self.take().text == "-":
                sign = -sign
        if self.tok.kind != "num":
            self.fail("expected a numeric constant")
        return sign * float(self.take().text)

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.take()
            return Const(float(tok.text))
        if tok.text == "(":
            self.take()
            node = self.expr()
            if self.tok.text != ")":
                self.fail("unbalanced parentheses: missing ')'", tok)
            self.take()
            return node
        if tok.kind == "name":
            self.take()
            if tok.text in self.variables:
                return Var(self.variables.index(tok.text), tok.text)
            if tok.text in _FUNCS or tok.text == "gaussian":
                return self.call(tok)
            self.fail(f"unknown identifier {tok.text!r}", tok)
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {tok.text!r}")

    def call(self, name_tok):
        if self.tok.text != "(":
            self.fail(f"function {name_tok.text!r} needs an argument list")
        open_tok = self.take()
        args = []
        if self.tok.text != ")":
            args.append(self.expr())
            while self.tok.text == ",":
                self.take()
                args.append(self.expr())
        if self.tok.text != ")":
            self.fail("unbalanced parentheses: missing ')'", open_tok)
        self.take()
        name = name_tok.text
        if name in _FUNCS:
            if len(args) != 1:
                self.fail(f"arity mismatch: {name} takes 1 argument, got {len(args)}", name_tok)
            return Func(name, args[0])
        n = len(self.variables)
        if len(args) not in (2, n + 1):
            self.fail(
                f"arity mismatch: gaussian takes 2 or {n + 1} arguments, got {len(args)}",
                name_tok,
            )
        values = []
        for a in args:
            folded = _fold(a)
            if folded is None:
                self.fail("gaussian arguments must be numeric constants", name_tok)
            values.append(folded)
        width = values[-1]
        if width == 0:
            self.fail("gaussian width must be nonzero", name_tok)
        centers = tuple(values[:-1]) * (n if len(values) == 2 else 1)
        return Gaussian(centers, width, self.variables)


def _fold(node):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Neg):
        inner = _fold(node.arg)
        return None if inner is None else -inner
    return None


def parse(text: str, variables: Sequence[str] = COORDS) -> Node:
    """Parse ``text`` into an expression tree over ``variables``."""
    return _Parser(text, variables).parse()


def to_text(node: Node) -> str:
    return node.text()


def is_constant(node: Node) -> bool:
    """True when no coordinate appears anywhere in the tree."""
    if isinstance(node, Var):
        return False
    if isinstance(node, Gaussian):
        return False
    return all(is_constant(c) for c in vars(node).values() if isinstance(c, Node))
