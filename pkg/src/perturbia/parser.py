"""Textual Lagrangian language: parser and printer.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*        # '/' only by a number
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | 'I' | '(' expr ')' | IDENT
            | 'conj' '(' expr ')' | 'd<k>' '(' expr ')' | 'dd' '(' expr ',' expr ')'

``I`` is the imaginary unit; identifiers are declared fields or formal
constants of the theory. ``format_polynomial`` emits text in the same
grammar, so ``parse(format(P)) == P``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigurationError, ParseError
from .exact import QI
from .field_algebra import FieldPolynomial, Theory, is_variation, VAR_PREFIX

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),])"
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", *_line_col(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind, m.group(), pos))
        pos = m.end()
    toks.append(Token("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, theory: Theory):
        self.text = text
        self.theory = theory
        self.toks = tokenize(text)
        self.i = 0
        self.n = theory.dim

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, *_line_col(self.text, tok.pos))

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.take()
        if t.text != text:
            self.i -= 1
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return t

    def parse(self) -> FieldPolynomial:
        if self.peek().kind == "eof":
            raise ParseError("empty input", 1, 1)
        out = self.expr()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().text!r}")
        return out

    def expr(self):
        acc = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                acc = acc * rhs
            else:
                c = _as_constant(rhs)
                if c is None or not c:
                    self.error("division only by a nonzero number", op)
                acc = acc.scale(1 / c)
        return acc

    def unary(self):
        if self.peek().text in ("+", "-"):
            op = self.take().text
            v = self.unary()
            return -v if op == "-" else v
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "num" or not t.text.isdigit():
                self.i -= 1
                self.error("exponent must be a nonnegative integer")
            return base ** int(t.text)
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return FieldPolynomial.constant(self.n, QI(Fraction(t.text)))
        if t.text == "(":
            v = self.expr()
            self.expect(")")
            return v
        if t.kind == "ident":
            name = t.text
            if self.peek().text == "(":
                return self.call(t)
            if name == "I":
                return FieldPolynomial.constant(self.n, QI(0, 1))
            if name in self.theory.constants:
                return FieldPolynomial.param(self.n, name)
            if name in self.theory.field_names:
                return FieldPolynomial.atom(self.n, name)
            self.i -= 1
            self.error(f"undeclared field {name!r}")
        self.i -= 1
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def call(self, t: Token):
        name = t.text
        self.expect("(")
        if name == "conj":
            arg = self.expr()
            self.expect(")")
            return conjugate(self.theory, arg)
        if name == "dd":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return self.theory.contract(a, b)
        m = re.fullmatch(r"d(\d+)", name)
        if m:
            mu = int(m.group(1))
            if mu >= self.n:
                self.i -= 2
                self.error(f"derivative index {mu} >= dimension {self.n}")
            arg = self.expr()
            self.expect(")")
            return arg.d(mu)
        self.i -= 2
        self.error(f"unknown function {name!r}")


def _as_constant(p: FieldPolynomial):
    if not p.terms:
        return QI(0)
    if list(p.terms) == [((), ())]:
        return p.terms[((), ())]
    return None


def conjugate(theory: Theory, p: FieldPolynomial) -> FieldPolynomial:
    """Star: swap each field with its partner and conjugate coefficients."""
    out = {}
    for (facs, params), c in p.terms.items():
        new = tuple(sorted((theory.conj(name), w) for name, w in facs))
        out[(new, params)] = out.get((new, params), QI(0)) + c.conjugate()
    return FieldPolynomial(p.n, out)


def parse_lagrangian(text: str, theory: Theory) -> FieldPolynomial:
    return _Parser(text, theory).parse()


# ------------------------------------------------------------------ printing

def _format_field(name: str, word) -> str:
    if is_variation(name):
        base = name[len(VAR_PREFIX):]
        s = f"{VAR_PREFIX}{base}" if not base.endswith("*") else f"{VAR_PREFIX}conj({base[:-1]})"
    elif name.endswith("*"):
        s = f"conj({name[:-1]})"
    else:
        s = name
    for mu in reversed(range(len(word))):
        for _ in range(word[mu]):
            s = f"d{mu}({s})"
    return s


def _format_coeff(c: QI) -> str:
    if c.im == 0:
        return str(c.re)
    if c.re == 0:
        return "I" if c.im == 1 else f"{c.im}*I"
    sign = "+" if c.im > 0 else "-"
    return f"({c.re}{sign}{abs(c.im)}*I)"


def format_monomial(key) -> str:
    facs, params = key
    parts = [p if k == 1 else f"{p}^{k}" for p, k in params]
    i = 0
    while i < len(facs):
        j = i
        while j < len(facs) and facs[j] == facs[i]:
            j += 1
        s = _format_field(*facs[i])
        parts.append(s if j - i == 1 else f"{s}^{j - i}")
        i = j
    return "*".join(parts)


def format_polynomial(p: FieldPolynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for key, c in p.sorted_terms():
        mono = format_monomial(key)
        neg = c.re < 0 if c.im == 0 else (c.re == 0 and c.im < 0)
        mag = -c if neg else c
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def polynomial_to_json(p: FieldPolynomial) -> list:
    """Canonical monomial list."""
    from .exact import format_qi

    rows = []
    for (facs, params), c in p.sorted_terms():
        rows.append({
            "coeff": format_qi(c),
            "constants": {k: v for k, v in params},
            "factors": [{"field": name, "d": list(w)} for name, w in facs],
        })
    return rows


def polynomial_from_json(rows: list, n: int) -> FieldPolynomial:
    from .exact import parse_qi

    terms = {}
    for r in rows:
        facs = tuple(sorted((f["field"], tuple(f["d"])) for f in r["factors"]))
        params = tuple(sorted(r["constants"].items()))
        if any(len(w) != n for _, w in facs):
            raise ConfigurationError("derivative word length does not match dimension")
        terms[(facs, params)] = parse_qi(r["coeff"])
    return FieldPolynomial(n, terms)
