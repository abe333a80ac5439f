"""Recursive-descent parser for the model expression language.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := NUMBER | NAME | NAME '(' args ')' | '(' expr ')'

Names: ``i``, declared parameters, fields and their jets written with an
underscore suffix (``phi_tt``, ``q_xxx``), and the functions ``sin``,
``cos`` and ``d(expr, x|t[, order])``.

Parsing produces a small tuple AST; :func:`to_scalar` turns it into a
canonical Scalar and :func:`evaluate` evaluates it directly at a point
(used by tests as an independent oracle).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..scalar import (COS, GQ, SIN, Assignment, Scalar, X, T, eval_rational,
                      field_jet, is_jet, is_param, jet, param, symbol,
                      total_derivative, trig_atom)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


class UnknownSymbol(ParseError):
    pass


class UnsupportedTrigArgument(ParseError):
    pass


class ForbiddenSymbol(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))")

SPECTRAL = ("lambda", "mu", "nu")


@dataclass
class Context:
    fields: tuple
    params: tuple
    line: int = 1
    col0: int = 1  # column of the first character of the text
    forbidden: tuple = ()  # parameter names rejected in this expression


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, ctx: Context) -> list:
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = ctx.col0 + pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", ctx.line, col)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), ctx.col0 + start))
        pos = m.end()
    toks.append(_Tok("end", "", ctx.col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.ctx = ctx
        self.toks = _tokenize(text, ctx)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.peek()
        return cls(msg, self.ctx.line, tok.col)

    def expect(self, text: str):
        t = self.take()
        if t.text != text:
            raise self.error(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def parse(self):
        node = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self):
        if self.peek().text == "-":
            self.take()
            return ("neg", self.unary())
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            sign = 1
            if self.peek().text == "-":
                self.take()
                sign = -1
            t = self.take()
            if t.kind != "num" or "." in t.text:
                raise self.error("exponent must be an integer", t)
            return ("pow", base, sign * int(t.text))
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return ("num", Fraction(t.text))
        if t.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            if self.peek().text == "(":
                return self.call(t)
            return self.name(t)
        raise self.error(f"unexpected {t.text or 'end of input'!r}", t)

    def call(self, t: _Tok):
        self.take()
        if t.text in ("sin", "cos"):
            arg = self.expr()
            self.expect(")")
            return (t.text, arg, t.col)
        if t.text == "d":
            arg = self.expr()
            self.expect(",")
            v = self.take()
            if v.text not in ("x", "t"):
                raise self.error("derivative variable must be x or t", v)
            order = 1
            if self.peek().text == ",":
                self.take()
                o = self.take()
                if o.kind != "num" or "." in o.text:
                    raise self.error("derivative order must be an integer", o)
                order = int(o.text)
            self.expect(")")
            return ("d", arg, X if v.text == "x" else T, order)
        raise self.error(f"unknown function {t.text!r}", t, UnknownSymbol)

    def name(self, t: _Tok):
        s = t.text
        if s == "i":
            return ("imag",)
        if s in self.ctx.fields:
            return ("jet", s, 0, 0)
        if "_" in s:
            base, suf = s.rsplit("_", 1)
            if base in self.ctx.fields and suf and set(suf) <= {"x", "t"}:
                return ("jet", base, suf.count("x"), suf.count("t"))
        if s in self.ctx.forbidden:
            raise self.error(f"symbol {s!r} is not allowed here", t, ForbiddenSymbol)
        if s in self.ctx.params:
            return ("param", s)
        raise self.error(f"unknown symbol {s!r}", t, UnknownSymbol)


def parse_expression(text: str, ctx: Context):
    return _Parser(text, ctx).parse()


# ---------------------------------------------------------------------------
# AST -> Scalar


def to_scalar(node, ctx: Context) -> Scalar:
    kind = node[0]
    if kind == "num":
        return Scalar(node[1])
    if kind == "imag":
        return Scalar(GQ(0, 1))
    if kind == "param":
        return symbol(node[1])
    if kind == "jet":
        return field_jet(node[1], node[2], node[3])
    if kind == "neg":
        return -to_scalar(node[1], ctx)
    if kind in ("add", "sub", "mul", "div"):
        a, b = to_scalar(node[1], ctx), to_scalar(node[2], ctx)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if not b:
            raise ParseError("division by zero", ctx.line, ctx.col0)
        if not b.is_jet_free:
            raise ParseError("division by an expression involving fields", ctx.line, ctx.col0)
        return a / b
    if kind == "pow":
        base = to_scalar(node[1], ctx)
        if node[2] < 0 and not base.is_jet_free:
            raise ParseError("negative powers are only allowed for parameters", ctx.line, ctx.col0)
        return base ** node[2]
    if kind in ("sin", "cos"):
        field, pmono, ratio = trig_argument(to_scalar(node[1], ctx), ctx, node[2])
        sign = 1
        if ratio < 0:
            ratio = -ratio
            sign = -1 if kind == "sin" else 1
        atom = trig_atom(SIN if kind == "sin" else COS, field, pmono, ratio)
        return Scalar.gen(atom) * sign
    if kind == "d":
        a = to_scalar(node[1], ctx)
        for _ in range(node[3]):
            a = total_derivative(a, node[2])
        return a
    raise AssertionError(kind)


def trig_argument(arg: Scalar, ctx: Context, col: int = 1):
    """Split ``c * params * field`` into (field, pmono, rational c)."""
    bad = UnsupportedTrigArgument(
        f"unsupported trig argument {arg}: expected rational * parameter monomial * field",
        ctx.line, col)
    if len(arg.num) != 1 or list(arg.den) != [()]:
        raise bad
    (mono, coeff), = arg.num.items()
    if coeff.im:
        raise bad
    jets = [(g, e) for g, e in mono if is_jet(g)]
    params = [(g, e) for g, e in mono if is_param(g)]
    if len(jets) != 1 or len(jets) + len(params) != len(mono):
        raise bad
    g, e = jets[0]
    if e != 1 or g.mx or g.mt:
        raise bad
    pmono = tuple(sorted((p.name, k) for p, k in params))
    return g.field, pmono, Fraction(int(coeff.re.numerator), int(coeff.re.denominator))


def parse_scalar(text: str, ctx: Context) -> Scalar:
    return to_scalar(parse_expression(text, ctx), ctx)


# ---------------------------------------------------------------------------
# direct evaluation (oracle)


def evaluate(node, point: Assignment, ctx: Context) -> GQ:
    kind = node[0]
    if kind == "num":
        return GQ(node[1])
    if kind == "imag":
        return GQ(0, 1)
    if kind == "param":
        return point.value(param(node[1]))
    if kind == "jet":
        return point.value(jet(node[1], node[2], node[3]))
    if kind == "neg":
        return -evaluate(node[1], point, ctx)
    if kind in ("add", "sub", "mul", "div"):
        a, b = evaluate(node[1], point, ctx), evaluate(node[2], point, ctx)
        return {"add": lambda: a + b, "sub": lambda: a - b,
                "mul": lambda: a * b, "div": lambda: a / b}[kind]()
    if kind == "pow":
        return evaluate(node[1], point, ctx) ** node[2]
    if kind in ("sin", "cos"):
        field, pmono, ratio = trig_argument(to_scalar(node[1], ctx), ctx)
        sign = 1
        if ratio < 0:
            ratio, sign = -ratio, (-1 if kind == "sin" else 1)
        atom = trig_atom(SIN if kind == "sin" else COS, field, pmono, ratio)
        return point.value(atom) * sign
    if kind == "d":
        return eval_rational(to_scalar(node, ctx), point)
    raise AssertionError(kind)
