"""Duality between the coordinate algebra A of GL_q(n) and the algebra A* generated by l+/l-.

Words on both sides are tuples of letters.

* ``ALetter(power, row, col)`` is ``S^power(t^row_col)``: power 0 is a coordinate function,
  1 its antipode image, -1 the inverse antipode, and so on.
* ``DualLetter(sign, power, row, col)`` is ``S^power((l^sign)^row_col)`` with sign ``"+"``
  or ``"-"``.

Letters of even power are coproduct-forward (``D x^a_c = x^a_e (x) x^e_c``); odd powers
are reversed because the antipode is an anti-coalgebra map.

The pairing of a single dual letter with a single A-letter only depends on the sum of their
powers; the matrices ``<S^k(l^a_c), t^i_j>`` are generated from ``k = 0`` by the antipode
axiom.  Longer words are handled by two exact representations:

* for a fixed pattern of A-letter powers, every dual word becomes a square matrix whose
  rows/columns are labelled by A-words (``represent``); products of dual words map to
  matrix products;
* for a fixed pattern of dual letter kinds, every A-word becomes a matrix labelled by dual
  words (``aux_represent``).

Doubled indices ``I = (row, col)`` are flattened to ``row*n + col``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .linalg import SMat
from .qfield import ONE, ZERO, RatFunc
from .lincomb import LinComb as _LinComb
from .lincomb import lin_sum as _sum
from .report import CheckResult
from .rtensor import RBundle, flip

__all__ = [
    "ALetter",
    "DualLetter",
    "AElem",
    "DualElem",
    "TwoLeg",
    "PairingTable",
    "PairingEngine",
    "Functionals",
    "a_word_text",
    "dual_word_text",
]


class ALetter(NamedTuple):
    power: int
    row: int
    col: int


class DualLetter(NamedTuple):
    sign: str
    power: int
    row: int
    col: int


def _a_letter_text(l: ALetter) -> str:
    core = f"t[{l.row + 1},{l.col + 1}]"
    if l.power == 0:
        return core
    if l.power == 1:
        return f"S({core})"
    return f"S^{l.power}({core})"


def _dual_letter_text(l: DualLetter) -> str:
    core = f"l{'p' if l.sign == '+' else 'm'}[{l.row + 1},{l.col + 1}]"
    if l.power == 0:
        return core
    if l.power == 1:
        return f"S({core})"
    return f"S^{l.power}({core})"


def a_word_text(word: tuple) -> str:
    return "*".join(_a_letter_text(l) for l in word) if word else "1"


def dual_word_text(word: tuple) -> str:
    return "*".join(_dual_letter_text(l) for l in word) if word else "1"


class AElem(_LinComb):
    __slots__ = ()
    _word_text = staticmethod(a_word_text)

    @classmethod
    def t(cls, i: int, j: int, power: int = 0) -> "AElem":
        return cls.word(ALetter(power, i, j))


class DualElem(_LinComb):
    __slots__ = ()
    _word_text = staticmethod(dual_word_text)

    @classmethod
    def l(cls, sign: str, i: int, j: int, power: int = 0) -> "DualElem":
        return cls.word(DualLetter(sign, power, i, j))


def antipode(x: _LinComb, k: int = 1):
    """``S^k`` on words: powers shift by k, word order reverses k times."""
    out = {}
    for w, c in x.terms.items():
        letters = tuple(l._replace(power=l.power + k) for l in w)
        if k % 2:
            letters = letters[::-1]
        out[letters] = c
    return type(x)(out)


def _split_letter(l, legs: int, n: int):
    """All ways to write the m-fold coproduct of one letter as a tuple of letters."""
    fwd = l.power % 2 == 0
    a, c = l.row, l.col
    start, end = (a, c) if fwd else (c, a)
    for mid in itertools.product(range(n), repeat=legs - 1):
        chain = (start,) + mid + (end,)
        if fwd:
            yield tuple(l._replace(row=chain[r], col=chain[r + 1]) for r in range(legs))
        else:
            yield tuple(l._replace(row=chain[r + 1], col=chain[r]) for r in range(legs))


def coproduct_words(x: _LinComb, n: int, legs: int = 2) -> dict:
    """m-fold coproduct of a word combination, as ``{(w_1, ..., w_m): coeff}``."""
    out: dict = {}
    for w, c in x.terms.items():
        partial = {tuple(() for _ in range(legs)): c}
        for letter in w:
            nxt: dict = {}
            for split in _split_letter(letter, legs, n):
                for key, v in partial.items():
                    k2 = tuple(key[r] + (split[r],) for r in range(legs))
                    s = nxt.get(k2)
                    nxt[k2] = v if s is None else s + v
            partial = nxt
        for key, v in partial.items():
            s = out.get(key)
            out[key] = v if s is None else s + v
    return {k: v for k, v in out.items() if not v.is_zero()}


class TwoLeg:
    """Element of X (x) X for X = A or A*: ``{(w1, w2): coeff}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def tensor(cls, x: _LinComb, y: _LinComb) -> "TwoLeg":
        return cls({(w1, w2): c1 * c2 for w1, c1 in x.terms.items() for w2, c2 in y.terms.items()})

    def __add__(self, other: "TwoLeg") -> "TwoLeg":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k)
            out[k] = v if s is None else s + v
        return TwoLeg(out)

    def __neg__(self) -> "TwoLeg":
        return TwoLeg({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TwoLeg") -> "TwoLeg":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms


# -- pairing matrices ----------------------------------------------------------------------


def _partial_transpose2(m: SMat, n: int) -> SMat:
    """Swap the second index of each pair: ``[(i,a),(j,c)] -> [(i,c),(j,a)]``."""
    out = SMat(m.nrows, m.ncols)
    for r, c, v in m.items():
        i, a = divmod(r, n)
        j, cc = divmod(c, n)
        out.rows.setdefault(i * n + cc, {})[j * n + a] = v
    return out


class PairingTable:
    """``matrix(sign, k)[(i, a), (j, c)] = <S^k(l^sign)^a_c, t^i_j>``.

    ``k = 0`` gives R for l+ and R21^{-1} for l-.  Going up one antipode step from a
    forward letter is the plain matrix inverse; from a reversed letter it is the inverse
    taken after transposing the second factor.  Going down inverts those steps.
    """

    def __init__(self, bundle: RBundle):
        self.n = bundle.n
        self._cache: dict[tuple[str, int], SMat] = {
            ("+", 0): bundle.R.to_matrix(),
            ("-", 0): flip(bundle.Rinv).to_matrix(),
        }

    def _step(self, m: SMat, k_low: int) -> SMat:
        # the relation between powers k_low and k_low + 1 is an involution, so the same
        # map goes up and down
        if k_low % 2 == 0:
            return m.inverse("pairing matrix")
        n = self.n
        return _partial_transpose2(_partial_transpose2(m, n).inverse("pairing matrix"), n)

    def matrix(self, sign: str, k: int) -> SMat:
        key = (sign, k)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if k > 0:
            m = self._step(self.matrix(sign, k - 1), k - 1)
        else:
            m = self._step(self.matrix(sign, k + 1), k)
        self._cache[key] = m
        return m

    def kind_matrix(self, kind: str, against: str = "t") -> SMat:
        """Named access: kind in l+, l-, S(l+), S(l-), Sinv(l+), Sinv(l-); against t or S(t)."""
        names = {"l+": ("+", 0), "l-": ("-", 0), "S(l+)": ("+", 1), "S(l-)": ("-", 1), "Sinv(l+)": ("+", -1), "Sinv(l-)": ("-", -1)}
        sign, k = names[kind]
        return self.matrix(sign, k + (1 if against == "S(t)" else 0))

    def letter(self, dl: DualLetter, al: ALetter) -> RatFunc:
        n = self.n
        return self.matrix(dl.sign, dl.power + al.power)[(al.row * n + dl.row, al.col * n + dl.col)]


def _chain_matrix(n: int, start: int, end: int, steps: list) -> dict:
    """Transfer-matrix contraction shared by both representations.

    ``steps[r](e, e2)`` yields ``(slot_row, slot_col, value)`` for one leg with chain
    indices e -> e2.  Returns ``{(row_multi, col_multi): value}`` for chains start -> end.
    """
    cur = {start: {(0, 0): ONE}}
    for step in steps:
        nxt: dict[int, dict] = {}
        for e, partial in cur.items():
            for e2 in range(n):
                contribs = list(step(e, e2))
                if not contribs:
                    continue
                tgt = nxt.setdefault(e2, {})
                for I_r, J_r, v in contribs:
                    for (I, J), w in partial.items():
                        key = (I * n + I_r, J * n + J_r)
                        p = w * v
                        s = tgt.get(key)
                        tgt[key] = p if s is None else s + p
        cur = {e: {k: v for k, v in d.items() if not v.is_zero()} for e, d in nxt.items()}
    return cur.get(end, {})


# -- composite functionals -------------------------------------------------------------------


@dataclass(frozen=True)
class Functionals:
    """Doubled-index families; ``f[I][J]`` is f^I_J (upper I, lower J), likewise ``phi``.

    ``chi[I]`` and ``chi_tilde[I]`` carry one lower doubled index; ``Y[i][j]`` is the n x n
    matrix l+^i_k S(l-^k_j).
    """

    n: int
    f: list
    chi: list
    phi: list
    chi_tilde: list
    Y: list


class PairingEngine:
    def __init__(self, bundle: RBundle):
        self.bundle = bundle
        self.n = bundle.n
        self.table = PairingTable(bundle)
        self._rep_letter_cache: dict = {}
        self._aux_letter_cache: dict = {}

    # -- single words ---------------------------------------------------------------------
    def _slot_rep_letter(self, dl: DualLetter, pattern: tuple) -> dict:
        key = (dl, pattern)
        hit = self._rep_letter_cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        fwd = dl.power % 2 == 0
        start, end = (dl.row, dl.col) if fwd else (dl.col, dl.row)
        steps = []
        for s in pattern:
            M = self.table.matrix(dl.sign, dl.power + s)

            def step(e, e2, M=M, s=s):
                up, down = (e, e2) if fwd else (e2, e)
                for row in range(n):
                    mrow = M.rows.get(row * n + up)
                    if not mrow:
                        continue
                    for col in range(n):
                        v = mrow.get(col * n + down)
                        if v is not None:
                            yield (row, col, v) if s % 2 == 0 else (col, row, v)

            steps.append(step)
        out = _chain_matrix(n, start, end, steps)
        self._rep_letter_cache[key] = out
        return out

    def represent(self, x: DualElem, pattern: tuple) -> SMat:
        """Matrix of ``x`` on A-words whose letter powers are ``pattern``.

        Entry ``[I, J]`` is ``<x, a_{I,J}>`` where letter r of ``a_{I,J}`` has
        (row, col) = (I_r, J_r) for even power and (J_r, I_r) for odd power.
        """
        N = self.n ** len(pattern)
        total = SMat(N, N)
        word_cache: dict = {(): SMat.identity(N)}
        for w, c in x.terms.items():
            m = self._word_rep(w, pattern, word_cache)
            for r, cc, v in m.items():
                total.add_to(r, cc, c * v)
        return total

    def _word_rep(self, w: tuple, pattern: tuple, cache: dict) -> SMat:
        hit = cache.get(w)
        if hit is not None:
            return hit
        N = self.n ** len(pattern)
        prefix = self._word_rep(w[:-1], pattern, cache)
        last = SMat.from_entries(N, N, ((I, J, v) for (I, J), v in self._slot_rep_letter(w[-1], pattern).items()))
        m = prefix @ last
        cache[w] = m
        return m

    def a_word_slot(self, word: tuple) -> tuple[tuple, int, int]:
        n = self.n
        pattern = tuple(l.power for l in word)
        I = J = 0
        for l in word:
            r, c = (l.row, l.col) if l.power % 2 == 0 else (l.col, l.row)
            I, J = I * n + r, J * n + c
        return pattern, I, J

    def slot_a_word(self, pattern: tuple, I: int, J: int) -> tuple:
        n = self.n
        m = len(pattern)
        rows = [(I // n ** (m - 1 - r)) % n for r in range(m)]
        cols = [(J // n ** (m - 1 - r)) % n for r in range(m)]
        return tuple(
            ALetter(s, rows[r], cols[r]) if s % 2 == 0 else ALetter(s, cols[r], rows[r]) for r, s in enumerate(pattern)
        )

    def _aux_rep_letter(self, al: ALetter, dpattern: tuple) -> SMat:
        key = (al, dpattern)
        hit = self._aux_letter_cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        fwd = al.power % 2 == 0
        start, end = (al.row, al.col) if fwd else (al.col, al.row)
        steps = []
        for sign, p in dpattern:
            M = self.table.matrix(sign, p + al.power)

            def step(f, f2, M=M, p=p):
                row, col = (f, f2) if fwd else (f2, f)
                mrow_base = row * n
                for a in range(n):
                    mrow = M.rows.get(mrow_base + a)
                    if not mrow:
                        continue
                    for c in range(n):
                        v = mrow.get(col * n + c)
                        if v is not None:
                            yield (a, c, v) if p % 2 == 0 else (c, a, v)

            steps.append(step)
        N = n ** len(dpattern)
        out = SMat.from_entries(N, N, ((I, J, v) for (I, J), v in _chain_matrix(n, start, end, steps).items()))
        self._aux_letter_cache[key] = out
        return out

    def aux_represent(self, a: AElem, dpattern: tuple) -> SMat:
        """Matrix of ``a`` on dual words of kind pattern ``((sign, power), ...)``."""
        N = self.n ** len(dpattern)
        total = SMat(N, N)
        cache: dict = {(): SMat.identity(N)}

        def rep(w):
            hit = cache.get(w)
            if hit is None:
                hit = rep(w[:-1]) @ self._aux_rep_letter(w[-1], dpattern)
                cache[w] = hit
            return hit

        for w, c in a.terms.items():
            for r, cc, v in rep(w).items():
                total.add_to(r, cc, c * v)
        return total

    def slot_dual_word(self, dpattern: tuple, I: int, J: int) -> tuple:
        n = self.n
        m = len(dpattern)
        rows = [(I // n ** (m - 1 - r)) % n for r in range(m)]
        cols = [(J // n ** (m - 1 - r)) % n for r in range(m)]
        return tuple(
            DualLetter(sign, p, rows[u], cols[u]) if p % 2 == 0 else DualLetter(sign, p, cols[u], rows[u])
            for u, (sign, p) in enumerate(dpattern)
        )

    # -- the pairing ------------------------------------------------------------------------
    def pair(self, x: DualElem, a: AElem) -> RatFunc:
        by_pattern: dict[tuple, list] = {}
        for w, c in a.terms.items():
            pattern, I, J = self.a_word_slot(w)
            by_pattern.setdefault(pattern, []).append((I, J, c))
        acc = ZERO
        for pattern, entries in by_pattern.items():
            m = self.represent(x, pattern)
            for I, J, c in entries:
                v = m[(I, J)]
                if not v.is_zero():
                    acc = acc + c * v
        return acc

    def pair_two_leg(self, x: TwoLeg, a: AElem, b: AElem) -> RatFunc:
        acc = ZERO
        for (w1, w2), c in x.terms.items():
            v = self.pair(DualElem({w1: ONE}), a)
            if v.is_zero():
                continue
            acc = acc + c * v * self.pair(DualElem({w2: ONE}), b)
        return acc

    def counit(self, x: DualElem) -> RatFunc:
        return self.pair(x, AElem.unit())

    # -- equality tests ------------------------------------------------------------------------
    def a_patterns(self, degree: int, with_antipode: bool = False) -> list[tuple]:
        pats = []
        for m in range(degree + 1):
            pats.append((0,) * m)
            if with_antipode:
                for pos in range(m):
                    pats.append(tuple(1 if r == pos else 0 for r in range(m)))
        return pats

    def functional_eq(self, x: DualElem, y: DualElem, degree: int, with_antipode: bool = False) -> tuple[bool, str | None]:
        """Pair x - y against every A-word of length <= degree (t letters; optionally one S(t))."""
        if degree < 1:
            raise ValueError("degree must be >= 1")
        diff = x - y
        for pattern in self.a_patterns(degree, with_antipode):
            m = self.represent(diff, pattern)
            if not m.is_zero():
                I, J, v = min(m.items(), key=lambda t: (t[0], t[1]))
                return False, f"<lhs - rhs, {a_word_text(self.slot_a_word(pattern, I, J))}> = {v}"
        return True, None

    def functional_is_zero(self, x: DualElem, degree: int, with_antipode: bool = False) -> tuple[bool, str | None]:
        return self.functional_eq(x, DualElem(), degree, with_antipode)

    def dual_patterns(self, degree: int) -> list[tuple]:
        kinds = (("+", 0), ("-", 0))
        out = []
        for m in range(degree + 1):
            out.extend(itertools.product(kinds, repeat=m))
        return out

    def a_is_zero(self, a: AElem, degree: int) -> tuple[bool, str | None]:
        """Bounded test of ``a == 0`` in A: pair against all l+/l- words of length <= degree."""
        for dp in self.dual_patterns(degree):
            m = self.aux_represent(a, dp)
            if not m.is_zero():
                I, J, v = min(m.items(), key=lambda t: (t[0], t[1]))
                return False, f"<{dual_word_text(self.slot_dual_word(dp, I, J))}, lhs - rhs> = {v}"
        return True, None

    def two_leg_is_zero(self, x: TwoLeg, degree: int) -> tuple[bool, str | None]:
        """Pair a two-leg functional against all (a, b) t-word pairs with len(a), len(b) <= degree."""
        by_first: dict[tuple, DualElem] = {}
        for (w1, w2), c in x.terms.items():
            by_first[w1] = by_first.get(w1, DualElem()) + DualElem({w2: c})
        pats = self.a_patterns(degree)
        for p1 in pats:
            firsts = {w1: self.represent(DualElem({w1: ONE}), p1) for w1 in by_first}
            for p2 in pats:
                acc: dict = {}
                for w1, rest in by_first.items():
                    m1 = firsts[w1]
                    if m1.is_zero():
                        continue
                    m2 = self.represent(rest, p2)
                    for r1, c1, v1 in m1.items():
                        for r2, c2, v2 in m2.items():
                            k = (r1, c1, r2, c2)
                            acc[k] = acc.get(k, ZERO) + v1 * v2
                for k in sorted(acc):
                    if not acc[k].is_zero():
                        a = self.slot_a_word(p1, k[0], k[1])
                        b = self.slot_a_word(p2, k[2], k[3])
                        return False, f"<lhs - rhs, {a_word_text(a)} (x) {a_word_text(b)}> = {acc[k]}"
        return True, None

    # -- coproducts and actions ------------------------------------------------------------------
    def coproduct_dual(self, x: DualElem) -> TwoLeg:
        return TwoLeg(coproduct_words(x, self.n, 2))

    def coproduct_a(self, a: AElem) -> TwoLeg:
        return TwoLeg(coproduct_words(a, self.n, 2))

    def left_action(self, x: DualElem, a: AElem) -> AElem:
        """``x |> a = a_(1) <x, a_(2)>``."""
        out: dict = {}
        for (w1, w2), c in coproduct_words(a, self.n, 2).items():
            v = self.pair(x, AElem({w2: ONE}))
            if not v.is_zero():
                out[w1] = out.get(w1, ZERO) + c * v
        return AElem(out)

    def right_action(self, a: AElem, x: DualElem) -> AElem:
        """``a <| x = <x, a_(1)> a_(2)``."""
        out: dict = {}
        for (w1, w2), c in coproduct_words(a, self.n, 2).items():
            v = self.pair(x, AElem({w1: ONE}))
            if not v.is_zero():
                out[w2] = out.get(w2, ZERO) + c * v
        return AElem(out)

    def dual_left_by(self, a: AElem, h: DualElem) -> DualElem:
        """``a |> h = h_(1) <h_(2), a>`` (A acting on A*)."""
        out: dict = {}
        for (w1, w2), c in coproduct_words(h, self.n, 2).items():
            v = self.pair(DualElem({w2: ONE}), a)
            if not v.is_zero():
                out[w1] = out.get(w1, ZERO) + c * v
        return DualElem(out)

    def dual_right_by(self, h: DualElem, a: AElem) -> DualElem:
        """``h <| a = <h_(1), a> h_(2)``."""
        out: dict = {}
        for (w1, w2), c in coproduct_words(h, self.n, 2).items():
            v = self.pair(DualElem({w1: ONE}), a)
            if not v.is_zero():
                out[w2] = out.get(w2, ZERO) + c * v
        return DualElem(out)

    # -- named elements -----------------------------------------------------------------------
    def r_elem(self, upper: int, lower: int) -> AElem:
        """``r^I_J = S(t^i_k) t^l_j`` for I = (i, j), J = (k, l)."""
        n = self.n
        i, j = divmod(upper, n)
        k, l = divmod(lower, n)
        return AElem.word(ALetter(1, i, k), ALetter(0, l, j))

    def r_matrix_elems(self) -> list[list[AElem]]:
        N = self.n * self.n
        return [[self.r_elem(I, J) for J in range(N)] for I in range(N)]

    @cached_property
    def _functionals(self) -> Functionals:
        n = self.n
        N = n * n
        b = self.bundle
        lam_inv = b.lam.inverse()
        f = [[None] * N for _ in range(N)]
        phi = [[None] * N for _ in range(N)]
        for I, J in itertools.product(range(N), repeat=2):
            i, j = divmod(I, n)
            k, l = divmod(J, n)
            f[I][J] = DualElem.word(DualLetter("-", 0, i, k), DualLetter("+", 1, l, j))
            phi[I][J] = DualElem.word(DualLetter("+", 0, l, j), DualLetter("-", -1, i, k))
        chi = []
        chi_t = []
        for J in range(N):
            k, l = divmod(J, n)
            acc = DualElem.unit(b.dinv(l, k))
            acc_t = DualElem.unit(-b.dinv(l, k))
            for I in range(N):
                i, j = divmod(I, n)
                dji = b.dinv(j, i)
                if not dji.is_zero():
                    acc = acc - f[I][J].scale(dji)
                dij = b.dinv(i, j)
                if not dij.is_zero():
                    acc_t = acc_t + phi[j * n + i][J].scale(dij)
            chi.append(acc.scale(lam_inv))
            chi_t.append(acc_t.scale(lam_inv))
        Y = [
            [_sum((DualElem.word(DualLetter("+", 0, i, k), DualLetter("-", 1, k, j)) for k in range(n)), DualElem) for j in range(n)]
            for i in range(n)
        ]
        return Functionals(n, f, chi, phi, chi_t, Y)

    def functionals(self) -> Functionals:
        return self._functionals


def functionals(bundle: RBundle, engine: PairingEngine | None = None) -> Functionals:
    return (engine or PairingEngine(bundle)).functionals()


def dual_sum(items: Iterable[DualElem]) -> DualElem:
    return _sum(items, DualElem)


def a_sum(items: Iterable[AElem]) -> AElem:
    return _sum(items, AElem)


# -- verification suites -------------------------------------------------------------------


def _first_failure(checks: Iterable[tuple[bool, str | None]]) -> tuple[bool, str | None]:
    for ok, w in checks:
        if not ok:
            return False, w
    return True, None


def _label(prefix: str, *idx: int) -> str:
    return prefix + "[" + ",".join(str(i + 1) for i in idx) + "]"


def test_a_words(n: int, max_len: int) -> list[AElem]:
    out = [AElem.unit()]
    for m in range(1, max_len + 1):
        for idx in itertools.product(range(n), repeat=2 * m):
            out.append(AElem.word(*(ALetter(0, idx[2 * r], idx[2 * r + 1]) for r in range(m))))
    return out


def verify_woronowicz(engine: PairingEngine, degree: int = 3, fam: Functionals | None = None, a_len: int = 1) -> list[CheckResult]:
    """Bicovariance conditions on r, f, chi.

    ``fam`` overrides the functionals (used for mutation tests).  A-side identities are
    tested on t-words of length <= ``a_len`` by pairing against l+/l- words of length
    <= ``degree``; two-leg identities use test words of length <= min(degree, 2) per leg.
    """
    n = engine.n
    N = n * n
    fam = fam or engine.functionals()
    F, chi = fam.f, fam.chi
    r = engine.r_matrix_elems()
    out = []
    two_deg = min(degree, 2)

    # coassociativity of r: exact two-leg word identity
    def r_coproduct():
        for I, J in itertools.product(range(N), repeat=2):
            lhs = coproduct_words(r[I][J], n, 2)
            rhs: dict = {}
            for K in range(N):
                for k, v in TwoLeg.tensor(r[K][J], r[I][K]).terms.items():
                    rhs[k] = rhs.get(k, ZERO) + v
            rhs = {k: v for k, v in rhs.items() if not v.is_zero()}
            if lhs != rhs:
                yield False, f"coproduct of r^{I + 1}_{J + 1}"
        yield True, None

    ok, w = _first_failure(r_coproduct())
    out.append(CheckResult("(23)", ok, None, w, "exact word identity"))

    def f_coproduct():
        for I, J in itertools.product(range(N), repeat=2):
            lhs = engine.coproduct_dual(F[I][J])
            rhs = TwoLeg()
            for K in range(N):
                rhs = rhs + TwoLeg.tensor(F[I][K], F[K][J])
            ok, w = engine.two_leg_is_zero(lhs - rhs, two_deg)
            yield ok, None if ok else f"{_label('f', I, J)}: {w}"

    ok, w = _first_failure(f_coproduct())
    out.append(CheckResult("(24)", ok, two_deg, w))

    tests = test_a_words(n, a_len)

    def f_r_exchange():
        for a in tests:
            for j, k in itertools.product(range(N), repeat=2):
                lhs = a_sum(engine.left_action(F[j][i], a) * r[i][k] for i in range(N))
                rhs = a_sum(r[j][i] * engine.right_action(a, F[i][k]) for i in range(N))
                ok, w = engine.a_is_zero(lhs - rhs, degree)
                if not ok:
                    yield False, f"a={a}, (j,k)=({j + 1},{k + 1}): {w}"
        yield True, None

    ok, w = _first_failure(f_r_exchange())
    out.append(CheckResult("(25)", ok, degree, w))

    def chi_coproduct():
        for I in range(N):
            lhs = engine.coproduct_dual(chi[I])
            rhs = TwoLeg.tensor(DualElem.unit(), chi[I])
            for J in range(N):
                rhs = rhs + TwoLeg.tensor(chi[J], F[J][I])
            ok, w = engine.two_leg_is_zero(lhs - rhs, two_deg)
            yield ok, None if ok else f"{_label('chi', I)}: {w}"

    ok, w = _first_failure(chi_coproduct())
    out.append(CheckResult("(26)", ok, two_deg, w))

    def chi_r_exchange():
        for a in tests:
            for i in range(N):
                lhs = engine.right_action(a, chi[i])
                rhs = a_sum(engine.left_action(chi[j], a) * r[j][i] for j in range(N))
                ok, w = engine.a_is_zero(lhs - rhs, degree)
                if not ok:
                    yield False, f"a={a}, i={i + 1}: {w}"
        yield True, None

    ok, w = _first_failure(chi_r_exchange())
    out.append(CheckResult("(27)", ok, degree, w))

    def normalizations():
        for I, J in itertools.product(range(N), repeat=2):
            want = ONE if I == J else ZERO
            if engine.counit(F[I][J]) != want:
                yield False, f"counit of {_label('f', I, J)}"
            r_eps = engine.pair(DualElem.unit(), r[I][J])
            if r_eps != want:
                yield False, f"counit of {_label('r', I, J)}"
            s_f = dual_sum(antipode(F[I][K]) * F[K][J] for K in range(N))
            ok, w = engine.functional_eq(s_f, DualElem.unit(want), degree, with_antipode=True)
            if not ok:
                yield False, f"S(f)f at ({I + 1},{J + 1}): {w}"
            s_r = a_sum(antipode(r[K][J]) * r[I][K] for K in range(N))
            ok, w = engine.a_is_zero(s_r - AElem.unit(want), degree)
            if not ok:
                yield False, f"S(r)r at ({I + 1},{J + 1}): {w}"
        yield True, None

    ok, w = _first_failure(normalizations())
    out.append(CheckResult("(28)", ok, degree, w))
    return out


def generator_functionals(n: int) -> list[tuple[str, DualElem]]:
    """The l+ and l- generators, labelled."""
    out = []
    for sign in "+-":
        for i, j in itertools.product(range(n), repeat=2):
            out.append((f"l{'p' if sign == '+' else 'm'}[{i + 1},{j + 1}]", DualElem.l(sign, i, j)))
    return out


def verify_functional_relations(engine: PairingEngine, sc, degree: int = 3) -> list[CheckResult]:
    """Exchange relations of chi, f, chi~ with A* elements, and the quantum Lie algebra.

    ``sc`` is the :class:`qgx.rtensor.StructureConstants` for the same bundle.
    """
    n = engine.n
    N = n * n
    fam = engine.functionals()
    F, chi, chit = fam.f, fam.chi, fam.chi_tilde
    r = engine.r_matrix_elems()
    sig, C, sigt, Ct = sc.sigma, sc.C, sc.sigma_tilde, sc.C_tilde
    gens = generator_functionals(n)
    out = []

    def chi_exchange():
        for name, h in gens:
            for i in range(N):
                rhs = dual_sum(engine.dual_left_by(r[j][i], h) * chi[j] for j in range(N))
                ok, w = engine.functional_eq(chi[i] * h, rhs, degree)
                if not ok:
                    yield False, f"h={name}, i={i + 1}: {w}"
        yield True, None

    ok, w = _first_failure(chi_exchange())
    out.append(CheckResult("(49)", ok, degree, w))

    def f_exchange():
        s_inv_r = [[antipode(r[J][M], -1) for M in range(N)] for J in range(N)]
        for name, h in gens:
            three = coproduct_words(h, n, 3)
            for j, i in itertools.product(range(N), repeat=2):
                rhs = DualElem()
                for (w1, w2, w3), c in three.items():
                    h1, h3 = DualElem({w1: ONE}), DualElem({w3: ONE})
                    for k in range(N):
                        v3 = engine.pair(h3, r[k][i])
                        if v3.is_zero():
                            continue
                        for m in range(N):
                            v1 = engine.pair(h1, s_inv_r[j][m])
                            if v1.is_zero():
                                continue
                            rhs = rhs + (DualElem({w2: ONE}) * F[m][k]).scale(c * v1 * v3)
                ok, w = engine.functional_eq(F[j][i] * h, rhs, degree)
                if not ok:
                    yield False, f"h={name}, f^{j + 1}_{i + 1}: {w}"
        yield True, None

    ok, w = _first_failure(f_exchange())
    out.append(CheckResult("(51)", ok, degree, w))

    def quantum_lie():
        for i, j in itertools.product(range(N), repeat=2):
            lhs = chi[i] * chi[j] - dual_sum(
                (chi[l] * chi[k]).scale(sig[(i, j, l, k)]) for l, k in itertools.product(range(N), repeat=2) if sig[(i, j, l, k)]
            )
            rhs = dual_sum(chi[k].scale(C[(i, j, k)]) for k in range(N) if C[(i, j, k)])
            ok, w = engine.functional_eq(lhs, rhs, degree)
            if not ok:
                yield False, f"(i,j)=({i + 1},{j + 1}): {w}"
        yield True, None

    ok, w = _first_failure(quantum_lie())
    out.append(CheckResult("(52)", ok, degree, w))

    def f_braid():
        for m, nn, k, l in itertools.product(range(N), repeat=4):
            lhs = dual_sum((F[i][k] * F[j][l]).scale(sig[(i, j, m, nn)]) for i, j in itertools.product(range(N), repeat=2) if sig[(i, j, m, nn)])
            rhs = dual_sum((F[m][i] * F[nn][j]).scale(sig[(k, l, i, j)]) for i, j in itertools.product(range(N), repeat=2) if sig[(k, l, i, j)])
            ok, w = engine.functional_eq(lhs, rhs, degree)
            if not ok:
                yield False, f"(m,n,k,l)=({m + 1},{nn + 1},{k + 1},{l + 1}): {w}"
        yield True, None

    ok, w = _first_failure(f_braid())
    out.append(CheckResult("(53)", ok, degree, w))

    def chi_f():
        for k, l, nn in itertools.product(range(N), repeat=3):
            lhs = chi[k] * F[nn][l]
            rhs = dual_sum((F[nn][i] * chi[j]).scale(sig[(k, l, i, j)]) for i, j in itertools.product(range(N), repeat=2) if sig[(k, l, i, j)])
            ok, w = engine.functional_eq(lhs, rhs, degree)
            if not ok:
                yield False, f"(k,l,n)=({k + 1},{l + 1},{nn + 1}): {w}"
        yield True, None

    ok, w = _first_failure(chi_f())
    out.append(CheckResult("(54)", ok, degree, w))

    def compat():
        for i, j, k in itertools.product(range(N), repeat=3):
            lhs = dual_sum((F[m][j] * F[nn][k]).scale(C[(m, nn, i)]) for m, nn in itertools.product(range(N), repeat=2) if C[(m, nn, i)])
            lhs = lhs + F[i][j] * chi[k]
            rhs = dual_sum((chi[m] * F[i][nn]).scale(sig[(j, k, m, nn)]) for m, nn in itertools.product(range(N), repeat=2) if sig[(j, k, m, nn)])
            rhs = rhs + dual_sum(F[i][m].scale(C[(j, k, m)]) for m in range(N) if C[(j, k, m)])
            ok, w = engine.functional_eq(lhs, rhs, degree)
            if not ok:
                yield False, f"(i,j,k)=({i + 1},{j + 1},{k + 1}): {w}"
        yield True, None

    ok, w = _first_failure(compat())
    out.append(CheckResult("(55)", ok, degree, w))

    def tilde_lie():
        for i, j in itertools.product(range(N), repeat=2):
            lhs = chit[i] * chit[j] - dual_sum(
                (chit[l] * chit[k]).scale(sigt[(j, i, k, l)]) for k, l in itertools.product(range(N), repeat=2) if sigt[(j, i, k, l)]
            )
            rhs = dual_sum(chit[k].scale(Ct[(i, j, k)]) for k in range(N) if Ct[(i, j, k)])
            ok, w = engine.functional_eq(lhs, rhs, degree)
            if not ok:
                yield False, f"(i,j)=({i + 1},{j + 1}): {w}"
        yield True, None

    ok, w = _first_failure(tilde_lie())
    out.append(CheckResult("(88)", ok, degree, w))

    def tilde_exchange():
        for name, h in gens:
            for i in range(N):
                rhs = dual_sum(engine.dual_right_by(h, r[j][i]) * chit[j] for j in range(N))
                ok, w = engine.functional_eq(chit[i] * h, rhs, degree)
                if not ok:
                    yield False, f"h={name}, i={i + 1}: {w}"
        yield True, None

    ok, w = _first_failure(tilde_exchange())
    out.append(CheckResult("(90) chi~", ok, degree, w))
    return out


def verify_tilded_functionals(engine: PairingEngine, degree: int = 3) -> list[CheckResult]:
    """phi = S^{-1}(f), chi~ = phi chi, the coproducts of phi and chi~, and Y = 1 - lambda X."""
    n = engine.n
    N = n * n
    fam = engine.functionals()
    F, phi, chi, chit = fam.f, fam.phi, fam.chi, fam.chi_tilde
    two_deg = min(degree, 2)
    out = []

    def phi_is_sinv_f():
        for I, J in itertools.product(range(N), repeat=2):
            ok, w = engine.functional_eq(phi[I][J], antipode(F[I][J], -1), degree, with_antipode=True)
            if not ok:
                yield False, f"{_label('phi', I, J)}: {w}"
        yield True, None

    ok, w = _first_failure(phi_is_sinv_f())
    out.append(CheckResult("(80) phi", ok, degree, w))

    def chit_is_phi_chi():
        for i in range(N):
            ok, w = engine.functional_eq(chit[i], dual_sum(phi[j][i] * chi[j] for j in range(N)), degree)
            if not ok:
                yield False, f"{_label('chi~', i)}: {w}"
        yield True, None

    ok, w = _first_failure(chit_is_phi_chi())
    out.append(CheckResult("(80) chi~", ok, degree, w))

    def coproducts():
        for I, J in itertools.product(range(N), repeat=2):
            rhs = TwoLeg()
            for K in range(N):
                rhs = rhs + TwoLeg.tensor(phi[K][J], phi[I][K])
            ok, w = engine.two_leg_is_zero(engine.coproduct_dual(phi[I][J]) - rhs, two_deg)
            if not ok:
                yield False, f"{_label('phi', I, J)}: {w}"
        for i in range(N):
            rhs = TwoLeg.tensor(chit[i], DualElem.unit())
            for j in range(N):
                rhs = rhs + TwoLeg.tensor(phi[j][i], chit[j])
            ok, w = engine.two_leg_is_zero(engine.coproduct_dual(chit[i]) - rhs, two_deg)
            if not ok:
                yield False, f"{_label('chi~', i)}: {w}"
        yield True, None

    ok, w = _first_failure(coproducts())
    out.append(CheckResult("(81)", ok, two_deg, w))

    def y_matrix():
        lam = engine.bundle.lam
        X = x_matrix(engine)
        for i, j in itertools.product(range(n), repeat=2):
            want = DualElem.unit(ONE if i == j else ZERO) - X[i][j].scale(lam)
            ok, w = engine.functional_eq(fam.Y[i][j], want, degree)
            if not ok:
                yield False, f"Y[{i + 1},{j + 1}]: {w}"
        yield True, None

    ok, w = _first_failure(y_matrix())
    out.append(CheckResult("(104)", ok, degree, w))
    return out


def x_matrix(engine: PairingEngine) -> list[list[DualElem]]:
    """``X = -chi~ D`` with chi~ read as the matrix ``(chi~)^i_m = chi~_{(m, i)}``."""
    n = engine.n
    chit = engine.functionals().chi_tilde
    b = engine.bundle
    return [
        [-dual_sum(chit[m * n + i].scale(b.d(m, j)) for m in range(n) if not b.d(m, j).is_zero()) for j in range(n)]
        for i in range(n)
    ]
