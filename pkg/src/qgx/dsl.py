"""Text syntax for algebra elements.

Letters carry 1-based matrix indices: ``t[i,j]``, ``w[i,j]`` (Omega), ``Y[i,j]``,
``X[i,j]`` and ``J[i,j]``.  Scalars are integers, ``q`` and ``lambda`` (= q - q^-1);
``^`` takes an integer exponent (negative only for scalars) and ``/`` divides by a scalar.
Operators on forms::

    d(e)            exterior derivative
    L[h](e)         Lie derivative along h: chi[i,j], chit[i,j], f[i,j,k,l], phi[i,j,k,l],
                    lp[i,j] or lm[i,j]; chi[i,j] is chi_(i,j) and f[i,j,k,l] is f^(i,j)_(k,l)
    i[i,j](e)       inner derivation gamma_(i,j)
    it[i,j](e)      inner derivation gamma~_(i,j)

``format_elem`` prints in the same syntax, so its output parses back to the same element.
"""

from __future__ import annotations

import re
from typing import Callable

from .lincomb import LinComb
from .ncalg import NCElem, decode
from .qfield import LAMBDA, ONE, Q, ParseError, RatFunc, as_ratfunc

__all__ = ["ParseError", "parse_expr", "format_elem", "word_text", "LETTER_NAMES"]

LETTER_NAMES = {"t": "T", "w": "W", "Y": "Y", "X": "X", "J": "J"}
_FUNCTIONAL_ARITY = {"chi": 2, "chit": 2, "f": 4, "phi": 4, "lp": 2, "lm": 2}

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_]*)|([-+*/^()\[\],]))")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m:
                rest = text[pos:]
                if rest.strip() == "":
                    break
                bad = pos + len(rest) - len(rest.lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad)
            kind = "int" if m.group(1) else "name" if m.group(2) else "sym"
            self.toks.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        if tok[0] == "end":
            raise ParseError("unexpected end of input", tok[2])
        self.i += 1
        return tok

    def expect(self, val: str):
        tok = self.peek()
        if tok[1] != val or tok[0] == "end":
            raise ParseError(f"expected {val!r}", tok[2])
        self.i += 1
        return tok


class _Parser:
    def __init__(self, text: str, n: int, forms: Callable | None):
        self.toks = _Tokens(text)
        self.n = n
        self._forms_factory = forms
        self._forms = None

    def forms(self, pos: int):
        if self._forms_factory is None:
            raise ParseError("form operators are not available here", pos)
        if self._forms is None:
            self._forms = self._forms_factory()
        return self._forms

    def parse(self) -> NCElem:
        e = self.expr()
        tok = self.toks.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self) -> NCElem:
        tok = self.toks.peek()
        sign = 1
        if tok[1] in "+-" and tok[0] == "sym":
            self.toks.take()
            sign = -1 if tok[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            tok = self.toks.peek()
            if tok[0] == "sym" and tok[1] in "+-":
                self.toks.take()
                t = self.term()
                acc = acc + t if tok[1] == "+" else acc - t
            else:
                return acc

    def term(self) -> NCElem:
        acc = self.unary()
        while True:
            tok = self.toks.peek()
            if tok[0] == "sym" and tok[1] in "*/":
                self.toks.take()
                at = self.toks.peek()[2]
                rhs = self.unary()
                if tok[1] == "*":
                    acc = acc * rhs
                else:
                    acc = acc.scale(self._scalar(rhs, at, "division by a non-scalar").inverse_or_error(at))
            else:
                return acc

    def unary(self) -> NCElem:
        tok = self.toks.peek()
        if tok[0] == "sym" and tok[1] == "-":
            self.toks.take()
            return -self.unary()
        return self.power()

    def power(self) -> NCElem:
        base = self.atom()
        tok = self.toks.peek()
        if not (tok[0] == "sym" and tok[1] == "^"):
            return base
        self.toks.take()
        neg = False
        if self.toks.peek()[1] == "-":
            self.toks.take()
            neg = True
        kind, val, pos = self.toks.take()
        if kind != "int":
            raise ParseError("exponent must be an integer", pos)
        k = int(val)
        if neg:
            s = self._scalar(base, pos, "negative power of a non-scalar")
            if s.is_zero():
                raise ParseError("negative power of zero", pos)
            return NCElem.unit(s**-k)
        out = NCElem.unit()
        for _ in range(k):
            out = out * base
        return out

    def _scalar(self, e: NCElem, pos: int, why: str) -> "_Scalar":
        if any(w for w in e.terms):
            raise ParseError(why, pos)
        return _Scalar(e.terms.get((), as_ratfunc(0)))

    def _indices(self, count: int) -> list[tuple[int, int]]:
        self.toks.expect("[")
        out = []
        for r in range(count):
            if r:
                self.toks.expect(",")
            kind, val, pos = self.toks.take()
            if kind != "int":
                raise ParseError("expected an index", pos)
            v = int(val)
            if not 1 <= v <= self.n:
                raise ParseError(f"index {v} out of range 1..{self.n}", pos)
            out.append((v - 1, pos))
        self.toks.expect("]")
        return out

    def _paren(self) -> NCElem:
        self.toks.expect("(")
        e = self.expr()
        self.toks.expect(")")
        return e

    def atom(self) -> NCElem:
        kind, val, pos = self.toks.take()
        if kind == "int":
            return NCElem.unit(int(val))
        if kind == "sym":
            if val == "(":
                e = self.expr()
                self.toks.expect(")")
                return e
            raise ParseError(f"unexpected {val!r}", pos)
        if val == "q":
            return NCElem.unit(Q)
        if val == "lambda":
            return NCElem.unit(LAMBDA)
        if val in LETTER_NAMES:
            (i, _), (j, _) = self._indices(2)
            return NCElem.letter(LETTER_NAMES[val], i, j, self.n)
        if val == "d":
            arg = self._paren()
            return self._apply(pos, lambda fc: fc.differential(arg))
        if val in ("i", "it"):
            (i, _), (j, _) = self._indices(2)
            arg = self._paren()
            return self._apply(pos, lambda fc: fc.inner(i * self.n + j, arg, tilde=val == "it"))
        if val == "L":
            self.toks.expect("[")
            h = self._functional()
            self.toks.expect("]")
            arg = self._paren()
            return self._apply(pos, lambda fc: fc.lie(h(fc), arg))
        raise ParseError(f"unknown name {val!r}", pos)

    def _functional(self):
        kind, name, pos = self.toks.take()
        if kind != "name" or name not in _FUNCTIONAL_ARITY:
            raise ParseError(f"unknown functional {name!r}", pos)
        idx = [v for v, _ in self._indices(_FUNCTIONAL_ARITY[name])]
        n = self.n
        if name == "chi":
            return lambda fc: fc.fam.chi[idx[0] * n + idx[1]]
        if name == "chit":
            return lambda fc: fc.fam.chi_tilde[idx[0] * n + idx[1]]
        if name in ("f", "phi"):
            return lambda fc: getattr(fc.fam, name)[idx[0] * n + idx[1]][idx[2] * n + idx[3]]
        from .hopfpair import DualElem

        return lambda fc: DualElem.l("+" if name == "lp" else "-", idx[0], idx[1])

    def _apply(self, pos: int, fn) -> NCElem:
        fc = self.forms(pos)
        try:
            return NCElem(fn(fc).terms)
        except ValueError as exc:
            raise ParseError(str(exc), pos) from exc


class _Scalar:
    def __init__(self, v: RatFunc):
        self.v = v

    def inverse_or_error(self, pos: int) -> RatFunc:
        if self.v.is_zero():
            raise ParseError("division by zero", pos)
        return self.v.inverse()

    def __pow__(self, k: int) -> RatFunc:
        return self.v**k

    def is_zero(self) -> bool:
        return self.v.is_zero()


def parse_expr(text: str, n: int, forms: Callable | None = None) -> NCElem:
    """Parse ``text`` into an NCElem for dimension ``n``.

    ``forms`` is a zero-argument callable returning a :class:`qgx.wcalc.FormCalculus`; it is
    only invoked when the text uses ``d``, ``L`` or ``i``/``it``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _Parser(text, n, forms).parse()


def _coeff_text(c: RatFunc) -> str:
    s = str(c)
    return s if re.fullmatch(r"\d+|q(\^-?\d+)?", s) else f"({s})"


def word_text(w: tuple, n: int, middle: str = "Y") -> str:
    names = ("t", "w", middle, "J")
    parts = []
    for c in w:
        rank, i, j = decode(c, n)
        parts.append(f"{names[rank]}[{i + 1},{j + 1}]")
    return "*".join(parts)


def format_elem(e: LinComb, n: int, middle: str = "Y") -> str:
    """Canonical text: terms sorted by word length then letter codes."""
    if not e.terms:
        return "0"
    out = []
    for w in sorted(e.terms, key=lambda w: (len(w), w)):
        c = e.terms[w]
        neg = False
        if str(c).startswith("-") and (-c).is_laurent() and len((-c).to_laurent().terms) == 1:
            neg, c = True, -c
        if not w:
            body = _coeff_text(c) if not neg else _coeff_text(c)
        elif c == ONE:
            body = word_text(w, n, middle)
        else:
            body = f"{_coeff_text(c)}*{word_text(w, n, middle)}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
