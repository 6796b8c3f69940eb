"""Sparse linear combinations of words with coefficients in Q(q)."""

from __future__ import annotations

from typing import Iterable

from .qfield import ONE, as_ratfunc


class LinComb:
    """Immutable-by-convention map word -> nonzero RatFunc."""

    __slots__ = ("terms",)

    @staticmethod
    def _word_text(w) -> str:
        return repr(w)

    def __init__(self, terms: dict | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def word(cls, *letters, coeff=ONE):
        return cls({tuple(letters): as_ratfunc(coeff)})

    @classmethod
    def unit(cls, coeff=ONE):
        return cls({(): as_ratfunc(coeff)})

    @classmethod
    def zero(cls):
        return cls()

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return self.terms.items()

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def _combine(self, other, sign):
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            out[w] = sign * c if s is None else s + sign * c
        return type(self)(out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return type(self)({w: -c for w, c in self.terms.items()})

    def scale(self, c):
        c = as_ratfunc(c)
        if c.is_zero():
            return type(self)()
        return type(self)({w: c * v for w, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, LinComb):
            return self.scale(other)
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                p = c1 * c2
                s = out.get(w)
                out[w] = p if s is None else s + p
        return type(self)(out)

    def __eq__(self, other):
        # a subclass (forms inside the word algebra) compares by terms; unrelated kinds do not
        if not (isinstance(other, type(self)) or isinstance(self, type(other))):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms):
            c = self.terms[w]
            parts.append(f"({c})*{self._word_text(w)}" if w else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__


def lin_sum(items: Iterable, cls):
    out: dict = {}
    for e in items:
        for w, c in e.terms.items():
            s = out.get(w)
            out[w] = c if s is None else s + c
    return cls(out)
