"""Immersion expressions: tokenizer, recursive-descent parser and evaluator.

Grammar (one expression per coordinate)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' integer)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom

Identifiers are the parameters ``u1..un``, declared constants, or one of the
functions ``sin, cos, exp, sqrt``.  Evaluation is generic over anything that
supports ``+ - * /`` (floats, numpy arrays, :class:`~metallic_geo.jet.Jet`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import EvaluationError, ParseError

FUNCTIONS = ("sin", "cos", "exp", "sqrt")
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class Num:
    value: float
    pos: tuple[int, int] = field(default=(1, 1), compare=False)

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Param:
    name: str
    pos: tuple[int, int] = field(default=(1, 1), compare=False)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    index: int  # zero-based
    pos: tuple[int, int] = field(default=(1, 1), compare=False)

    def __str__(self):
        return f"u{self.index + 1}"


@dataclass(frozen=True)
class Unary:
    op: str  # neg, sin, cos, exp, sqrt
    arg: "Node"
    pos: tuple[int, int] = field(default=(1, 1), compare=False)

    def __str__(self):
        return f"-({self.arg})" if self.op == "neg" else f"{self.op}({self.arg})"


@dataclass(frozen=True)
class Binary:
    op: str  # add, sub, mul, div, pow
    left: "Node"
    right: "Node"
    pos: tuple[int, int] = field(default=(1, 1), compare=False)

    def __str__(self):
        sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[self.op]
        return f"({self.left} {sym} {self.right})"


Node = Union[Num, Param, Var, Unary, Binary]

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", line, i + 1, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), line, start + 1))
        i = m.end()
    toks.append(_Tok("end", "", line, len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str, line: int, n: int, constants):
        self.text = text
        self.toks = _tokenize(text, line)
        self.i = 0
        self.n = n
        self.constants = set(constants)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, tok: _Tok, msg: str):
        raise ParseError(msg, tok.line, tok.col, self.text)

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.text != text or t.kind != "op":
            self.fail(t, f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        t = self.peek()
        if t.kind != "end":
            self.fail(t, f"unexpected token {t.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            t = self.take()
            node = Binary("add" if t.text == "+" else "sub", node, self.term(), (t.line, t.col))
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            t = self.take()
            node = Binary("mul" if t.text == "*" else "div", node, self.factor(), (t.line, t.col))
        return node

    def factor(self) -> Node:
        node = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            t = self.take()
            e = self.peek()
            if e.kind != "num" or not e.text.isdigit():
                self.fail(e, "exponent must be a non-negative integer literal")
            self.take()
            node = Binary("pow", node, Num(float(int(e.text)), (e.line, e.col)), (t.line, t.col))
        return node

    def atom(self) -> Node:
        t = self.peek()
        if t.kind == "num":
            self.take()
            return Num(float(t.text), (t.line, t.col))
        if t.kind == "op" and t.text == "-":
            self.take()
            return Unary("neg", self.atom(), (t.line, t.col))
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "ident":
            self.take()
            name = t.text
            has_call = self.peek().kind == "op" and self.peek().text == "("
            if name in FUNCTIONS:
                if not has_call:
                    self.fail(t, f"function {name!r} requires one parenthesized argument")
                self.take()
                arg = self.expr()
                if self.peek().kind == "op" and self.peek().text == ")":
                    self.take()
                else:
                    self.fail(self.peek(), f"function {name!r} takes exactly one argument")
                return Unary(name, arg, (t.line, t.col))
            if has_call:
                self.fail(t, f"{name!r} is not a function")
            m = re.fullmatch(r"u([1-9]\d*)", name)
            if m and int(m.group(1)) <= self.n:
                return Var(int(m.group(1)) - 1, (t.line, t.col))
            if name in self.constants:
                return Param(name, (t.line, t.col))
            self.fail(t, f"unknown identifier {name!r}")
        self.fail(t, f"unexpected token {t.text or 'end of input'!r}")


def parse_expression(text: str, n: int, constants: Mapping[str, float] | None = None,
                     line: int = 1) -> Node:
    """Parse one coordinate expression over ``u1..un`` and the given constants."""
    return _Parser(text, line, n, constants or {}).parse()


def parse_immersion(text, n: int, constants: Mapping[str, float] | None = None) -> list[Node]:
    """Parse a list of coordinate expressions, or a string with one per non-blank line.

    Errors report the line (coordinate position in the input) and column.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    out = []
    for k, src in enumerate(lines, start=1):
        if isinstance(text, str) and not src.strip():
            continue
        out.append(parse_expression(src, n, constants, line=k))
    if not out:
        raise ParseError("no coordinate expressions", 1, 1, text if isinstance(text, str) else None)
    return out


def free_names(node: Node) -> set[str]:
    if isinstance(node, (Var, Param)):
        return {str(node)}
    if isinstance(node, Unary):
        return free_names(node.arg)
    if isinstance(node, Binary):
        return free_names(node.left) | free_names(node.right)
    return set()


def _values_of(x) -> np.ndarray:
    return np.asarray(getattr(x, "val", x), dtype=float)


def _unary(op: str, x, node):
    if op == "neg":
        return -x
    v = _values_of(x)
    if op == "sqrt" and np.any(v <= SINGULAR_TOL):
        raise EvaluationError(f"sqrt of non-positive value at {node}", node)
    if hasattr(x, "apply"):
        return x.apply(op)
    return {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt}[op](x)


def evaluate(node: Node, u, constants: Mapping[str, float] | None = None):
    """Evaluate ``node``; ``u[i]`` may be floats, arrays or jets."""
    constants = constants or {}
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Param):
        return float(constants[node.name])
    if isinstance(node, Var):
        return u[node.index]
    if isinstance(node, Unary):
        return _unary(node.op, evaluate(node.arg, u, constants), node)
    a = evaluate(node.left, u, constants)
    if node.op == "pow":
        k = int(node.right.value)
        if hasattr(a, "power"):
            return a.power(k)
        return a ** k
    b = evaluate(node.right, u, constants)
    if node.op == "add":
        return a + b
    if node.op == "sub":
        return a - b
    if node.op == "mul":
        return a * b
    if np.any(np.abs(_values_of(b)) <= SINGULAR_TOL):
        raise EvaluationError(f"division by ~0 at {node}", node)
    return a / b
