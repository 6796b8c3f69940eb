"""Exact arithmetic in the field Q(q) of rational functions of the deformation parameter.

Every coefficient in the package is a :class:`RatFunc`.  Values are immutable and kept
in a canonical form (coprime numerator/denominator, monic denominator), so equality is
structural and zero-testing is decidable.

Polynomial arithmetic is delegated to FLINT (``python-flint``); the Laurent-polynomial
view, the canonical form and the text syntax live here.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Union

from flint import fmpq, fmpq_poly

__all__ = [
    "QFieldError",
    "QDivisionByZero",
    "PoleError",
    "ParseError",
    "LaurentPoly",
    "RatFunc",
    "ZERO",
    "ONE",
    "Q",
    "LAMBDA",
    "as_ratfunc",
    "arith",
    "eval_at",
    "parse",
]

Scalar = Union[int, Fraction, "RatFunc"]


class QFieldError(ArithmeticError):
    pass


class QDivisionByZero(QFieldError, ZeroDivisionError):
    pass


class PoleError(QFieldError):
    """Raised when a rational function is evaluated at one of its poles."""

    def __init__(self, point):
        super().__init__(f"pole at q = {point}")
        self.point = point


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_P_ONE = fmpq_poly([1])
_P_ZERO = fmpq_poly([])
_P_Q = fmpq_poly([0, 1])


def _to_fraction(c) -> Fraction:
    c = fmpq(c)
    return Fraction(int(c.p), int(c.q))


def _low_order(p: fmpq_poly) -> int:
    """Multiplicity of q as a factor of ``p`` (p nonzero)."""
    k = 0
    for c in p.coeffs():
        if c != 0:
            return k
        k += 1
    raise ValueError("zero polynomial")


class LaurentPoly:
    """Sparse Laurent polynomial in q with exact rational coefficients.

    Only nonzero coefficients are stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Fraction | int] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[int(e)] = c
        self._terms = clean

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def low(self) -> int:
        return min(self._terms) if self._terms else 0

    def high(self) -> int:
        return max(self._terms) if self._terms else 0

    def to_ratfunc(self) -> "RatFunc":
        if not self._terms:
            return ZERO
        lo = min(0, self.low())
        coeffs = [0] * (self.high() - lo + 1)
        for e, c in self._terms.items():
            coeffs[e - lo] = fmpq(c.numerator, c.denominator)
        num = fmpq_poly(coeffs)
        den = _P_ONE if lo == 0 else fmpq_poly([0] * (-lo) + [1])
        return RatFunc._make(num, den)

    def __str__(self):
        return _laurent_str(self._terms)

    __repr__ = __str__


def _laurent_str(terms: Mapping[int, Fraction]) -> str:
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, reverse=True):
        c = terms[e]
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = str(a)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


class RatFunc:
    """Element of Q(q) stored as ``num/den`` with gcd 1 and ``den`` monic.

    Negative powers of q live in the denominator, so Laurent polynomials are the values
    whose denominator is a power of q.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Scalar | fmpq_poly = 0, den: Scalar | fmpq_poly = 1):
        n = _coerce_pair(num)
        d = _coerce_pair(den)
        # a/b with a = n0/n1, b = d0/d1
        top = n[0] * d[1]
        bot = n[1] * d[0]
        if bot.is_zero():
            raise QDivisionByZero("zero denominator")
        c = RatFunc._make(top, bot)
        self.num, self.den, self._hash = c.num, c.den, None

    @classmethod
    def _make(cls, num: fmpq_poly, den: fmpq_poly) -> "RatFunc":
        self = object.__new__(cls)
        if num.is_zero():
            self.num, self.den, self._hash = _P_ZERO, _P_ONE, None
            return self
        if not den.is_one():
            g = num.gcd(den)
            if not g.is_one():
                num = num // g
                den = den // g
            lc = den.leading_coefficient()
            if lc != 1:
                num = num / lc
                den = den / lc
        self.num, self.den, self._hash = num, den, None
        return self

    @classmethod
    def _raw(cls, num: fmpq_poly, den: fmpq_poly) -> "RatFunc":
        self = object.__new__(cls)
        self.num, self.den, self._hash = num, den, None
        return self

    # -- predicates -------------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def is_laurent(self) -> bool:
        """True iff the denominator is a power of q."""
        d = self.den
        return d.degree() == _low_order(d)

    def is_monomial(self) -> bool:
        """True iff the value is c*q^k for a nonzero rational c."""
        if self.is_zero() or not self.is_laurent():
            return False
        return sum(1 for c in self.num.coeffs() if c != 0) == 1

    # -- views ------------------------------------------------------------------------
    def laurent_parts(self) -> tuple[LaurentPoly, LaurentPoly]:
        """Canonical (numerator, denominator) as Laurent polynomials.

        The denominator has lowest exponent 0 and leading coefficient 1.
        """
        k = _low_order(self.den)
        num = {i - k: _to_fraction(c) for i, c in enumerate(self.num.coeffs()) if c != 0}
        den = {i - k: _to_fraction(c) for i, c in enumerate(self.den.coeffs()) if c != 0}
        return LaurentPoly(num), LaurentPoly(den)

    def to_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise QFieldError(f"{self} is not a Laurent polynomial")
        return self.laurent_parts()[0]

    # -- arithmetic -------------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = as_ratfunc(other)
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        d1, d2 = self.den, other.den
        if d1.is_one() and d2.is_one():
            s = self.num + other.num
            return RatFunc._raw(s, _P_ONE) if not s.is_zero() else ZERO
        if d1 == d2:
            return RatFunc._make(self.num + other.num, d1)
        return RatFunc._make(self.num * d2 + other.num * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den) if not self.num.is_zero() else self

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            other = as_ratfunc(other)
        return self + (-other)

    def __rsub__(self, other):
        return as_ratfunc(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            other = as_ratfunc(other)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        d1, d2 = self.den, other.den
        if d1.is_one() and d2.is_one():
            return RatFunc._raw(self.num * other.num, _P_ONE)
        return RatFunc._make(self.num * other.num, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise QDivisionByZero("inverse of zero")
        return RatFunc._make(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            other = as_ratfunc(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_ratfunc(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc._make(self.num**k, self.den**k) if k else ONE

    # -- comparison / hashing ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = as_ratfunc(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    # -- evaluation -------------------------------------------------------------------
    def eval_at(self, q0) -> Fraction:
        return eval_at(self, q0)

    def __str__(self):
        num, den = self.laurent_parts()
        if den == _LP_ONE:
            return str(num)
        return f"({num})/({den})"

    def __repr__(self):
        return f"RatFunc({str(self)!r})"

    def __reduce__(self):
        return (parse, (str(self),))


def _coerce_pair(x) -> tuple[fmpq_poly, fmpq_poly]:
    if isinstance(x, RatFunc):
        return x.num, x.den
    if isinstance(x, fmpq_poly):
        return x, _P_ONE
    if isinstance(x, bool):
        raise TypeError("bool is not a field element")
    if isinstance(x, int):
        return fmpq_poly([x]), _P_ONE
    if isinstance(x, Fraction):
        return fmpq_poly([fmpq(x.numerator, x.denominator)]), _P_ONE
    if isinstance(x, fmpq):
        return fmpq_poly([x]), _P_ONE
    raise TypeError(f"cannot convert {type(x).__name__} to RatFunc")


_CONST_CACHE: dict[int, RatFunc] = {}


def as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, int) and not isinstance(x, bool) and -64 <= x <= 64:
        c = _CONST_CACHE.get(x)
        if c is None:
            c = _CONST_CACHE[x] = RatFunc(x)
        return c
    if isinstance(x, str):
        return parse(x)
    return RatFunc(x)


ZERO = RatFunc._raw(_P_ZERO, _P_ONE)
ONE = RatFunc._raw(_P_ONE, _P_ONE)
Q = RatFunc._raw(_P_Q, _P_ONE)
LAMBDA = Q - Q.inverse()
_LP_ONE = LaurentPoly({0: 1})


def arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Field operation selected by name: ``add``, ``sub``, ``mul`` or ``div``."""
    a, b = as_ratfunc(a), as_ratfunc(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def eval_at(f: RatFunc, q0) -> Fraction:
    """Exact value of ``f`` at the rational point ``q0``."""
    q0 = Fraction(q0)
    if q0 == 0:
        raise ValueError("q0 = 0 is not allowed (Laurent expressions)")
    f = as_ratfunc(f)
    x = fmpq(q0.numerator, q0.denominator)
    d = f.den(x)
    if d == 0:
        raise PoleError(q0)
    return _to_fraction(f.num(x) / d)


# -- text syntax ----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive-descent parser for polynomial literals.

    Grammar::

        expr   := ['-'|'+'] term (('+'|'-') term)*
        term   := power (('*'|'/') power)*
        power  := atom ('^' ['-'] int)?
        atom   := int | 'q' | '(' expr ')' | '-' power
    """

    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                bad = len(text) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad)
            start = m.start(m.lastindex)
            if m.group(1):
                self.toks.append(("int", m.group(1), start))
            elif m.group(2):
                self.toks.append(("q", "q", start))
            else:
                tok = m.group(3)
                self.toks.append(("op", "^" if tok == "**" else tok, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            raise ParseError(f"expected {val!r}", t[2])

    def parse(self) -> RatFunc:
        v = self.expr()
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"unexpected {t[1]!r}", t[2])
        return v

    def expr(self):
        t = self.peek()
        if t[1] in "+-" and t[0] == "op":
            self.take()
            v = self.term()
            v = -v if t[1] == "-" else v
        else:
            v = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in ("+", "-"):
                self.take()
                w = self.term()
                v = v + w if t[1] == "+" else v - w
            else:
                return v

    def term(self):
        v = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in ("*", "/"):
                self.take()
                w = self.power()
                if t[1] == "*":
                    v = v * w
                else:
                    if w.is_zero():
                        raise ParseError("division by zero", t[2])
                    v = v / w
            else:
                return v

    def power(self):
        v = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            sign = 1
            t2 = self.peek()
            if t2[1] in ("-", "+") and t2[0] == "op":
                self.take()
                sign = -1 if t2[1] == "-" else 1
            t3 = self.take()
            if t3[0] == "int":
                k = sign * int(t3[1])
            elif t3[1] == "(":
                inner = self.expr()
                self.expect(")")
                if not (inner.den.is_one() and inner.num.degree() <= 0):
                    raise ParseError("exponent must be an integer", t3[2])
                k = _to_fraction(inner.num.coeffs()[0] if inner.num.coeffs() else 0)
                if k.denominator != 1:
                    raise ParseError("exponent must be an integer", t3[2])
                k = sign * int(k)
            else:
                raise ParseError("expected integer exponent", t3[2])
            if k < 0 and v.is_zero():
                raise ParseError("zero to a negative power", t3[2])
            v = v**k
        return v

    def atom(self):
        t = self.take()
        if t[0] == "int":
            return as_ratfunc(int(t[1]))
        if t[0] == "q":
            return Q
        if t[1] == "(":
            v = self.expr()
            self.expect(")")
            return v
        if t[1] == "-":
            return -self.power()
        raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2])


def parse(text: str) -> RatFunc:
    """Parse the polynomial literal syntax, e.g. ``"q^2 - 1"`` or ``"1/(q - q^-1)"``."""
    return _Parser(text).parse()
