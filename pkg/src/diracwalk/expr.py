"""Tiny arithmetic grammar for user-supplied metric coefficients.

Supported: + - * / ^ (right-associative power), unary minus, parentheses,
the functions sin cos sinh cosh exp, the variables x0 x1, and numeric
literals.  Expressions compile to callables that broadcast over numpy
arrays, and the compiler reports which variables an expression actually
uses so callers can detect time-independent metrics.
"""

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ExpressionError(ValueError):
    pass


_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ExpressionError(f"unexpected character {text[pos]!r} at position {pos}")
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


@dataclass
class CompiledExpression:
    """A parsed expression: fn broadcasts over (x0, x1) numpy inputs."""

    text: str
    fn: Callable
    variables: frozenset = field(default_factory=frozenset)

    def __call__(self, x0, x1):
        return self.fn(x0, x1)

    @property
    def uses_x0(self) -> bool:
        return "x0" in self.variables


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0
        self.variables = set()

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ExpressionError(f"expected {op!r}, found {val!r}")

    # expr := term (('+'|'-') term)*
    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            lhs = node
            if op == "+":
                node = lambda x0, x1, a=lhs, b=rhs: a(x0, x1) + b(x0, x1)
            else:
                node = lambda x0, x1, a=lhs, b=rhs: a(x0, x1) - b(x0, x1)
        return node

    # term := factor (('*'|'/') factor)*
    def term(self):
        node = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.factor()
            lhs = node
            if op == "*":
                node = lambda x0, x1, a=lhs, b=rhs: a(x0, x1) * b(x0, x1)
            else:
                node = lambda x0, x1, a=lhs, b=rhs: a(x0, x1) / b(x0, x1)
        return node

    # factor := ('-'|'+') factor | power
    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.factor()
            return lambda x0, x1, a=inner: -a(x0, x1)
        if self.peek() == ("op", "+"):
            self.take()
            return self.factor()
        return self.power()

    # power := atom ('^' factor)?   right-associative
    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            exponent = self.factor()
            return lambda x0, x1, a=base, b=exponent: a(x0, x1) ** b(x0, x1)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return lambda x0, x1, v=val: v
        if kind == "name":
            if val in ("x0", "x1"):
                self.variables.add(val)
                if val == "x0":
                    return lambda x0, x1: x0
                return lambda x0, x1: x1
            if val in _FUNCTIONS:
                fn = _FUNCTIONS[val]
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return lambda x0, x1, f=fn, a=arg: f(a(x0, x1))
            raise ExpressionError(f"unknown name {val!r}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError(f"unexpected token {val!r}")


def compile_expression(text: str) -> CompiledExpression:
    """Parse and compile one coefficient expression."""
    if not isinstance(text, str) or text.strip() == "":
        raise ExpressionError("empty expression")
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    kind, _ = parser.take()
    if kind != "end":
        raise ExpressionError(f"trailing input in expression {text!r}")
    return CompiledExpression(text=text, fn=node, variables=frozenset(parser.variables))
