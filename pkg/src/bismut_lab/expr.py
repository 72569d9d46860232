"""Rational expressions in z_k and zb_k (= conj(z_k)).

Grammar:
    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := number | ident | 'conj' '(' expr ')' | '(' expr ')' | '-' factor
    ident  := 'z' k | 'zb' k
Numbers may carry a trailing 'i' (imaginary literal); a bare 'i' is the unit.
conj(...) is pushed down to the leaves while parsing, so the tree never
contains it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ExprError(ValueError):
    def __init__(self, message, pos=None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} at position {pos}")


@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    index: int  # 1-based
    barred: bool = False


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


Expr = Num | Var | Neg | Bin

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)


def tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", pos))
    return out


_VAR = re.compile(r"(zb|z)([1-9]\d*)")


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value:
            raise ExprError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Bin(op, node, self.factor())
        return node

    def factor(self):
        kind, text, pos = self.take()
        if kind == "num":
            if text.endswith("i"):
                return Num(complex(0, float(text[:-1])))
            return Num(complex(float(text), 0))
        if kind == "name":
            if text == "i":
                return Num(1j)
            if text == "conj":
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return conj_expr(inner)
            m = _VAR.fullmatch(text)
            if not m:
                raise ExprError(f"unknown identifier {text!r}", pos)
            return Var(int(m.group(2)), m.group(1) == "zb")
        if text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if text == "-":
            return Neg(self.factor())
        raise ExprError(f"unexpected {text or 'end of input'!r}", pos)


def parse_expression(text: str):
    p = _Parser(text)
    node = p.expr()
    kind, tok, pos = p.peek()
    if kind != "end":
        raise ExprError(f"unexpected {tok!r}", pos)
    return node


def conj_expr(e):
    if isinstance(e, Num):
        return Num(e.value.conjugate())
    if isinstance(e, Var):
        return Var(e.index, not e.barred)
    if isinstance(e, Neg):
        return Neg(conj_expr(e.arg))
    return Bin(e.op, conj_expr(e.left), conj_expr(e.right))


def _fmt_real(x):
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def _num_text(z: complex):
    re_, im = z.real, z.imag
    if im == 0:
        return _fmt_real(re_)
    if re_ == 0:
        return _fmt_real(im) + "i"
    # printed as a sum, so it takes the precedence of '+'
    sign = "+" if im > 0 else "-"
    return f"{_fmt_real(re_)} {sign} {_fmt_real(abs(im))}i"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e):
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Num):
        if e.value.real != 0 and e.value.imag != 0:
            return 1
        if _num_text(e.value).startswith("-"):
            return 3
    return 4


def to_text(e) -> str:
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return f"{'zb' if e.barred else 'z'}{e.index}"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        return "-" + (f"({inner})" if _prec(e.arg) < 3 else inner)
    p = _PREC[e.op]
    left = to_text(e.left)
    if _prec(e.left) < p:
        left = f"({left})"
    right = to_text(e.right)
    if _prec(e.right) <= p:
        right = f"({right})"
    sep = f" {e.op} " if p == 1 else e.op
    return left + sep + right


def variables(e):
    if isinstance(e, Var):
        return {(e.index, e.barred)}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


def fold(e, leaf):
    """Evaluate with Python arithmetic; leaf maps Num/Var nodes to values."""
    if isinstance(e, (Num, Var)):
        return leaf(e)
    if isinstance(e, Neg):
        return -fold(e.arg, leaf)
    a = fold(e.left, leaf)
    b = fold(e.right, leaf)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return a / b


def evaluate_at(e, z):
    """Complex value at the point z (sequence of complex coordinates)."""

    def leaf(node):
        if isinstance(node, Num):
            return node.value
        v = complex(z[node.index - 1])
        return v.conjugate() if node.barred else v

    return fold(e, leaf)


def substitute(e, mapping):
    """Replace Var nodes via mapping[(index, barred)] -> Expr."""
    if isinstance(e, Num):
        return e
    if isinstance(e, Var):
        return mapping.get((e.index, e.barred), e)
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping))
    return Bin(e.op, substitute(e.left, mapping), substitute(e.right, mapping))


def as_expr(x):
    if isinstance(x, str):
        return parse_expression(x)
    if isinstance(x, (Num, Var, Neg, Bin)):
        return x
    if isinstance(x, (int, float, complex)):
        return Num(complex(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def linear_combination(const: complex, coeffs):
    """const + Σ c * node over (c, node) pairs, skipping zeros."""
    terms = [Num(complex(const))] if const != 0 else []
    for c, node in coeffs:
        if c == 0:
            continue
        terms.append(node if c == 1 else Bin("*", Num(complex(c)), node))
    if not terms:
        return Num(0j)
    out = terms[0]
    for t in terms[1:]:
        out = Bin("+", out, t)
    return out
