"""Recursive-descent parser for component expressions.

Grammar (``^`` binds tightest, then unary minus, then ``* /``, then ``+ -``)::

    expr     = term {("+" | "-") term}
    term     = unary {("*" | "/") unary}
    unary    = "-" unary | power
    power    = base ["^" exponent]
    exponent = ["-"] number ["^" exponent] | "(" ["-"] number ["/" number] ")" ["^" exponent]
    base     = number | symbol | func "(" expr ")" | "(" expr ")"

Exponents are literals; a chain ``a^2^3`` is right-associative and folds to
``a^8``.  Parenthesized input is kept as a :class:`Group` node so that
:func:`pretty` reproduces an AST that reparses identically.
"""
from __future__ import annotations

import difflib
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

from . import jets as J

FUNCTION_NAMES = tuple(sorted(J.FUNCTIONS))
ALIASES_4D = ("t", "r", "theta", "phi")


class ExpressionError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownSymbol(ExpressionError):
    def __init__(self, name: str, offset: int, suggestions: Sequence[str]):
        hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
        ValueError.__init__(self, f"unknown symbol {name!r} at offset {offset}{hint}")
        self.offset = offset
        self.name = name
        self.suggestions = list(suggestions)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: Fraction


@dataclass(frozen=True)
class Group:
    inner: "Node"


Node = Union[Num, Sym, Func, BinOp, Neg, Pow, Group]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    byte = lambda i: len(text[:i].encode())  # noqa: E731
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            tokens.append(Token("end", "", byte(pos)))
            return tokens
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character {text[pos]!r}", byte(pos))
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), byte(m.start(kind))))
        pos = m.end()


class Scope:
    """Names an expression may use: coordinates (with aliases) and parameters."""

    def __init__(self, coords: Sequence[str], params: Sequence[str] = (), aliases: Mapping[str, int] | None = None):
        self.coords = list(coords)
        self.params = list(params)
        self.aliases = dict(aliases or {})
        clash = set(self.coords + list(self.aliases)) & set(self.params)
        if clash:
            raise ValueError(f"names used both as coordinate and parameter: {sorted(clash)}")

    @classmethod
    def standard(cls, n: int, params: Sequence[str] = ()) -> "Scope":
        """x0..x{n-1}; t, r, theta, phi alias x0..x3 when n = 4, theta, phi alias x0, x1 when n = 2."""
        aliases = {}
        if n == 4:
            aliases = {a: i for i, a in enumerate(ALIASES_4D)}
        elif n == 2:
            aliases = {"theta": 0, "phi": 1}
        return cls([f"x{i}" for i in range(n)], params, aliases)

    def names(self) -> list[str]:
        return self.coords + list(self.aliases) + self.params

    def coordinate_index(self, name: str) -> int | None:
        if name in self.coords:
            return self.coords.index(name)
        return self.aliases.get(name)

    def check(self, name: str, offset: int) -> None:
        if name not in self.names():
            raise UnknownSymbol(name, offset, difflib.get_close_matches(name, self.names() + list(FUNCTION_NAMES), n=3))


class _Parser:
    def __init__(self, text: str, scope: Scope | None):
        self.tokens = tokenize(text)
        self.i = 0
        self.scope = scope

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def is_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def accept(self, op: str) -> bool:
        if self.is_op(op):
            self.advance()
            return True
        return False

    def expect_op(self, op: str) -> Token:
        if not self.is_op(op):
            raise ExpressionError(f"expected {op!r}, found {self.tok.text or 'end of input'!r}", self.tok.offset)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionError(f"unexpected {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.is_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.is_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.is_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.base()
        if self.is_op("^"):
            self.advance()
            return Pow(base, self.exponent())
        return base

    def number(self) -> Fraction:
        if self.tok.kind != "num":
            raise ExpressionError("exponent must be a numeric literal", self.tok.offset)
        return Fraction(self.advance().text)

    def exponent(self) -> Fraction:
        start = self.tok.offset
        if self.is_op("("):
            self.advance()
            sign = -1 if self.accept("-") else 1
            value = self.number()
            if self.is_op("/"):
                self.advance()
                den = self.number()
                if den == 0:
                    raise ExpressionError("zero denominator in exponent", start)
                value = value / den
            self.expect_op(")")
            value = sign * value
        else:
            sign = -1 if self.accept("-") else 1
            value = sign * self.number()
        if self.is_op("^"):
            self.advance()
            outer = self.exponent()
            if outer.denominator != 1 or (value == 0 and outer < 0):
                raise ExpressionError("chained exponent does not fold to a rational", start)
            value = value ** int(outer)
        return value

    def base(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if self.is_op("("):
                if t.text not in J.FUNCTIONS:
                    sugg = difflib.get_close_matches(t.text, FUNCTION_NAMES, n=3)
                    raise UnknownSymbol(t.text, t.offset, sugg)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Func(t.text, arg)
            if t.text in J.FUNCTIONS:
                raise ExpressionError(f"function {t.text!r} needs an argument", t.offset)
            if self.scope is not None:
                self.scope.check(t.text, t.offset)
            return Sym(t.text)
        if self.is_op("("):
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return Group(inner)
        raise ExpressionError(f"unexpected {t.text or 'end of input'!r}", t.offset)


def parse_expression(text: str, scope: Scope | None = None) -> Node:
    """Parse ``text``; symbols are validated against ``scope`` when given."""
    return _Parser(text, scope).parse()


def _format_exponent(p: Fraction) -> str:
    if p.denominator == 1:
        return str(p.numerator)
    return f"({p.numerator}/{p.denominator})"


def pretty(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Func):
        return f"{node.name}({pretty(node.arg)})"
    if isinstance(node, BinOp):
        return f"{pretty(node.left)} {node.op} {pretty(node.right)}"
    if isinstance(node, Neg):
        return f"-{pretty(node.operand)}"
    if isinstance(node, Pow):
        return f"{pretty(node.base)}^{_format_exponent(node.exponent)}"
    if isinstance(node, Group):
        return f"({pretty(node.inner)})"
    raise TypeError(f"not an expression node: {node!r}")


def symbols(node: Node) -> set[str]:
    if isinstance(node, Sym):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Func,)):
        return symbols(node.arg)
    if isinstance(node, BinOp):
        return symbols(node.left) | symbols(node.right)
    if isinstance(node, Neg):
        return symbols(node.operand)
    if isinstance(node, Pow):
        return symbols(node.base)
    return symbols(node.inner)


def _pow(x, p: Fraction):
    if p.denominator == 1:
        return J.power(x, int(p)) if isinstance(x, J.Jet) else x ** int(p)
    return J.power(x, float(p)) if isinstance(x, J.Jet) else math.pow(x, float(p))


def evaluate(node: Node, env: Mapping[str, object]):
    """Evaluate over jets or floats; ``env`` maps every symbol to a value."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Sym):
        return env[node.name]
    if isinstance(node, Func):
        arg = evaluate(node.arg, env)
        if isinstance(arg, J.Jet):
            return J.FUNCTIONS[node.name](arg)
        return J.FLOAT_FUNCTIONS[node.name](arg)
    if isinstance(node, BinOp):
        a, b = evaluate(node.left, env), evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Pow):
        return _pow(evaluate(node.base, env), node.exponent)
    if isinstance(node, Group):
        return evaluate(node.inner, env)
    raise TypeError(f"not an expression node: {node!r}")


def compile_expression(node: Node) -> Callable[[Mapping[str, float]], float]:
    """Closure evaluating ``node`` over plain floats with the math module."""
    if isinstance(node, Num):
        v = node.value
        return lambda env: v
    if isinstance(node, Sym):
        name = node.name
        return lambda env: env[name]
    if isinstance(node, Func):
        f, arg = J.FLOAT_FUNCTIONS[node.name], compile_expression(node.arg)
        return lambda env: f(arg(env))
    if isinstance(node, BinOp):
        a, b = compile_expression(node.left), compile_expression(node.right)
        ops = {
            "+": lambda env: a(env) + b(env),
            "-": lambda env: a(env) - b(env),
            "*": lambda env: a(env) * b(env),
            "/": lambda env: a(env) / b(env),
        }
        return ops[node.op]
    if isinstance(node, Neg):
        inner = compile_expression(node.operand)
        return lambda env: -inner(env)
    if isinstance(node, Pow):
        base, p = compile_expression(node.base), node.exponent
        if p.denominator == 1:
            k = int(p)
            return lambda env: base(env) ** k
        e = float(p)
        return lambda env: math.pow(base(env), e)
    if isinstance(node, Group):
        return compile_expression(node.inner)
    raise TypeError(f"not an expression node: {node!r}")


def bind(scope: Scope, coords, params: Mapping[str, float]) -> dict:
    """Environment for :func:`evaluate` from coordinate values (floats or jets) and parameter values."""
    missing = [p for p in scope.params if p not in params]
    if missing:
        raise ValueError(f"missing parameter values: {missing}")
    env = {name: coords[i] for i, name in enumerate(scope.coords)}
    env.update({a: coords[i] for a, i in scope.aliases.items()})
    env.update({p: float(params[p]) for p in scope.params})
    return env


def split_arguments(text: str) -> list[str]:
    """Split ``"a, f(b, c), d"`` at top-level commas."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p.strip() for p in parts]


_DIAG = re.compile(r"^\s*diag\s*\((.*)\)\s*$", re.S)


def parse_metric_table(source, n: int, scope: Scope) -> list[list[Node]]:
    """n x n AST table from ``"diag(...)"``, a list of n diagonal strings, or an n x n table.

    For full tables only the upper triangle is read; the lower triangle mirrors it.
    """
    if isinstance(source, str):
        m = _DIAG.match(source)
        if not m:
            raise ValueError("a metric string must have the form diag(e1, ..., en)")
        source = split_arguments(m.group(1))
    rows = list(source)
    if len(rows) != n:
        raise ValueError(f"metric table has {len(rows)} rows, expected {n}")
    if all(isinstance(r, str) for r in rows):
        diag = [parse_expression(r, scope) for r in rows]
        return [[diag[i] if i == j else Num(0.0) for j in range(n)] for i in range(n)]
    table = [[None] * n for _ in range(n)]
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError(f"metric row {i} has {len(row)} entries, expected {n}")
        for j in range(i, n):
            table[i][j] = table[j][i] = parse_expression(str(row[j]), scope)
    return table


def parse_tensor_table(source, shape: tuple[int, ...], scope: Scope):
    """Nested list of expression strings of the given shape into a nested list of ASTs."""
    if not shape:
        return parse_expression(str(source), scope)
    if not isinstance(source, (list, tuple)) or len(source) != shape[0]:
        raise ValueError(f"expected a list of length {shape[0]}")
    return [parse_tensor_table(s, shape[1:], scope) for s in source]


def evaluate_table(table, env):
    if isinstance(table, list):
        return [evaluate_table(t, env) for t in table]
    return evaluate(table, env)
