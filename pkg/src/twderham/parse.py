"""Expression grammar for polynomials and forms.

::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*        # '/' only by a nonzero constant
    unary  := '-' unary | power
    power  := atom ('^' atom)*                # integer exponent -> power,
                                              # otherwise '^' is the wedge
    atom   := NUMBER | NAME | '(' expr ')'

Names are ``x1..x9``, ``t``, ``t1..t9``, ``lambda`` (coefficient parameter) and
differentials ``dx1..dx9``, ``dt``, ``dt1..dt9``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from fractions import Fraction
from typing import Sequence

from .errors import ParseError
from .forms import Form
from .poly import Poly
from .rings import Ring

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))", re.S)
_VAR = re.compile(r"^(x[1-9]|t[1-9]?|lambda)$")
_DIFF = re.compile(r"^d(x[1-9]|t[1-9]?)$")

# Parsed value: {differential tuple: {monomial: Fraction}}, monomial = sorted ((name, exp), ...)


def _name_key(name: str):
    if name.startswith("x"):
        return (0, int(name[1:]))
    if name == "t":
        return (1, 0)
    if name.startswith("t"):
        return (1, int(name[1:]))
    return (2, 0)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace is left
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        for k in range(pos, start):
            if text[k] == "\n":
                line, line_start = line + 1, k + 1
        col = start - line_start + 1
        num, name, other = m.group(1), m.group(2), m.group(3)
        if num is not None:
            tokens.append(_Token("num", num, line, col))
        elif name is not None:
            tokens.append(_Token("name", name, line, col))
        elif other is not None:
            if other not in "+-*/^()":
                raise ParseError(f"unexpected character {other!r}", line, col)
            tokens.append(_Token(other, other, line, col))
        pos = m.end()
    # end-of-input column
    tail = text[line_start:]
    tokens.append(_Token("end", "", line, len(tail) + 1))
    return tokens


def _scalar(value: Fraction):
    return {(): {(): value}} if value else {}


def _add_into(acc, other, sign=1):
    for dk, poly in other.items():
        target = acc.setdefault(dk, {})
        for mono, c in poly.items():
            v = target.get(mono, 0) + sign * c
            if v:
                target[mono] = v
            else:
                target.pop(mono, None)
        if not target:
            del acc[dk]
    return acc


def _mono_mul(a, b):
    merged = defaultdict(int)
    for name, k in a + b:
        merged[name] += k
    return tuple(sorted(merged.items(), key=lambda t: _name_key(t[0])))


def _diff_merge(a, b):
    seq = list(a) + list(b)
    if len(set(seq)) != len(seq):
        return None
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if _name_key(seq[j]) > _name_key(seq[j + 1]):
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return tuple(seq), sign


def _mul(x, y):
    out = {}
    for da, pa in x.items():
        for db, pb in y.items():
            merged = _diff_merge(da, db)
            if merged is None:
                continue
            dk, sign = merged
            target = out.setdefault(dk, {})
            for ma, ca in pa.items():
                for mb, cb in pb.items():
                    m = _mono_mul(ma, mb)
                    v = target.get(m, 0) + sign * ca * cb
                    if v:
                        target[m] = v
                    else:
                        target.pop(m, None)
            if not target:
                del out[dk]
    return out


def _is_zero_form(x):
    return all(dk == () for dk in x)


class _Parser:
    def __init__(self, text, allowed):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allowed = allowed

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def parse(self):
        if self.peek().kind == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return value

    def expr(self):
        sign = 1
        if self.peek().kind in "+-" and self.peek().kind != "end":
            sign = -1 if self.take().kind == "-" else 1
        acc = _add_into({}, self.term(), sign)
        while self.peek().kind in ("+", "-"):
            sign = -1 if self.take().kind == "-" else 1
            _add_into(acc, self.term(), sign)
        return acc

    def term(self):
        acc = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.kind == "*":
                acc = _mul(acc, rhs)
            else:
                if set(rhs) - {()} or any(m != () for m in rhs.get((), {})):
                    self.fail("can only divide by a nonzero constant", op)
                c = rhs.get((), {}).get((), 0)
                if c == 0:
                    self.fail("division by zero", op)
                acc = _mul(acc, _scalar(Fraction(1) / c))
        return acc

    def unary(self):
        if self.peek().kind == "-":
            self.take()
            return _mul(_scalar(Fraction(-1)), self.unary())
        return self.power()

    def power(self):
        acc = self.atom()
        while self.peek().kind == "^":
            op = self.take()
            nxt = self.peek()
            if nxt.kind == "num" and _is_zero_form(acc):
                self.take()
                k = int(nxt.text)
                result = _scalar(Fraction(1))
                for _ in range(k):
                    result = _mul(result, acc)
                acc = result
            elif nxt.kind in ("name", "("):
                rhs = self.atom()
                if _is_zero_form(acc) and _is_zero_form(rhs):
                    self.fail("'^' between non-differentials needs an integer exponent", op)
                acc = _mul(acc, rhs)
            else:
                self.fail("expected an exponent or a differential after '^'", nxt)
        return acc

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return _scalar(Fraction(int(tok.text)))
        if tok.kind == "name":
            name = tok.text
            if _DIFF.match(name):
                if name[1:] not in self.allowed:
                    raise ParseError(f"unknown differential {name!r}", tok.line, tok.col)
                return {(name[1:],): {(): Fraction(1)}}
            if _VAR.match(name) and name in self.allowed:
                return {(): {((name, 1),): Fraction(1)}}
            raise ParseError(f"unknown variable {name!r}", tok.line, tok.col)
        if tok.kind == "(":
            value = self.expr()
            if self.peek().kind != ")":
                self.fail("expected ')'")
            self.take()
            return value
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.line, tok.col)
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)


def parse_expression(text: str, names: Sequence[str], param: str | None = None):
    """Parse into the raw ``{differentials: {monomial: Fraction}}`` structure."""
    allowed = set(names) | ({param} if param else set())
    return _Parser(text, allowed).parse()


def _convert(raw, ring: Ring, names: Sequence[str], param: str | None):
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    out = {}
    for dk, poly in raw.items():
        grouped: dict[tuple, dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
        for mono, c in poly.items():
            e = [0] * n
            lam = 0
            for name, k in mono:
                if name == param:
                    lam += k
                else:
                    e[index[name]] += k
            grouped[tuple(e)][lam] += c
        terms = {}
        for e, coeffs in grouped.items():
            if param is None:
                terms[e] = ring.from_fraction(coeffs.get(0, Fraction(0)))
            else:
                terms[e] = ring.from_param_poly(dict(coeffs))
        out[tuple(index[d] for d in dk)] = Poly(ring, n, terms)
    return out


def parse_poly(text: str, ring: Ring, names: Sequence[str], param: str | None = None) -> Poly:
    raw = parse_expression(text, names, param)
    if set(raw) - {()}:
        raise ParseError("expected a polynomial, found differentials", 1, 1)
    return _convert(raw, ring, names, param).get((), Poly.zero(ring, len(names)))


def parse_form(text: str, ring: Ring, names: Sequence[str], param: str | None = None) -> Form:
    raw = parse_expression(text, names, param)
    out = Form(ring, len(names))
    for idx, p in _convert(raw, ring, names, param).items():
        out = out + Form.from_poly(p, idx)
    return out


def used_x_variables(*texts: str) -> int:
    """Largest ``k`` such that ``xk`` (or ``dxk``) appears in any text."""
    best = 0
    for text in texts:
        for m in re.finditer(r"(?<![A-Za-z0-9_])d?x([1-9])(?![0-9])", text):
            best = max(best, int(m.group(1)))
    return best


def x_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]
