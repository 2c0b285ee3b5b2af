"""Tiny coefficient grammar used by equation configs.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | 't' | name | func '(' expr ')' | '(' expr ')'

Names other than ``t`` and the function names are parameters, bound at
evaluation time.  ``render`` writes a fully parenthesised form so that
``parse(render(e)) == e``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .errors import ParseError

FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Param, Neg, Call, BinOp]

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        num, name, sym = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", float(num), start))
        elif name is not None:
            out.append(("name", name, start))
        else:
            if sym not in "+-*/^()":
                raise ParseError(f"unexpected character {sym!r}", start)
            out.append((sym, sym, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Num(val)
        if kind == "name":
            self.take()
            if val in FUNCS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Call(val, arg)
            return Var() if val == "t" else Param(val)
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def parse(text: str) -> Expr:
    """Parse an expression string; raises :class:`ParseError` with the offending position."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    return node


def render(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{render(e.arg)})"
    if isinstance(e, Call):
        return f"{e.func}({render(e.arg)})"
    return f"({render(e.left)} {e.op} {render(e.right)})"


def params_of(e: Expr) -> set:
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, (Neg, Call)):
        return params_of(e.arg)
    if isinstance(e, BinOp):
        return params_of(e.left) | params_of(e.right)
    return set()


def evaluate(e: Expr, t, params: Optional[Mapping[str, float]] = None):
    """Vectorised evaluation at ``t`` (scalar or array)."""
    params = params or {}
    t = np.asarray(t, dtype=float)

    def ev(node):
        if isinstance(node, Num):
            return np.full(t.shape, node.value)
        if isinstance(node, Var):
            return t
        if isinstance(node, Param):
            if node.name not in params:
                raise KeyError(f"unbound parameter {node.name!r}")
            return np.full(t.shape, float(params[node.name]))
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, Call):
            return FUNCS[node.func](ev(node.arg))
        a, b = ev(node.left), ev(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)

    with np.errstate(divide="ignore", invalid="ignore"):
        out = ev(e)
    return out if out.shape else float(out)


def bind(e: Expr, params: Mapping[str, float]) -> Expr:
    """Replace bound parameters by numeric constants."""
    if isinstance(e, Param) and e.name in params:
        return Num(float(params[e.name]))
    if isinstance(e, Neg):
        return Neg(bind(e.arg, params))
    if isinstance(e, Call):
        return Call(e.func, bind(e.arg, params))
    if isinstance(e, BinOp):
        return BinOp(e.op, bind(e.left, params), bind(e.right, params))
    return e
