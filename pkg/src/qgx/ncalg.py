"""Rewriting engine for the algebra generated by T, Omega, Y (or X) and J.

Letters are small integers ``rank*n*n + row*n + col`` with rank 0 = T, 1 = Omega (``w``),
2 = Y or X, 3 = J.  Words are tuples of letters, compared degree-first and then
lexicographically by letter rank; this is the monomial order every rule respects.  Families
come in the order T < Omega < Y < J; inside a family T and Omega indices ascend while Y/X
and J indices descend (``letter_ordinals``), which is the choice that makes every overlap
resolve.

A matrix relation such as ``W1 R21^-1 W2 R21 + R21^-1 W2 R^-1 W1 = 0`` is expanded into its
``n^4`` scalar entries.  Each family of entries is row-reduced with the largest words as
pivots, and every pivot becomes a rule ``pivot -> combination of smaller words``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable

from .hopfpair import AElem, ALetter, PairingEngine
from .lincomb import LinComb
from .linalg import SMat, rref
from .qfield import ONE, ZERO, RatFunc, as_ratfunc, eval_at
from .report import CheckResult
from .rtensor import RBundle

__all__ = [
    "NCElem",
    "NCMat",
    "RuleSet",
    "RuleError",
    "FuelExhausted",
    "build_rules",
    "normal_form",
    "mul",
    "check_overlaps",
    "quantum_lie_check",
    "coaction_check",
    "relation_family",
    "FAMILY_LABELS",
]

RANK = {"T": 0, "W": 1, "Y": 2, "X": 2, "J": 3}
DEFAULT_FUEL = 10**6
# direction of the within-family index order, per family rank
DEFAULT_ORDER = {0: "asc", 1: "asc", 2: "desc", 3: "desc"}


class RuleError(ValueError):
    """A relation family cannot be oriented into rewriting rules."""

    def __init__(self, msg: str, family: str):
        super().__init__(msg)
        self.family = family


class FuelExhausted(RuntimeError):
    def __init__(self, word: tuple, steps: int):
        super().__init__(f"rewriting did not terminate within {steps} steps (starting from word {word})")
        self.word = word
        self.steps = steps


class NCElem(LinComb):
    __slots__ = ()

    @classmethod
    def letter(cls, family: str, i: int, j: int, n: int) -> "NCElem":
        return cls({(code(family, i, j, n),): ONE})


def code(family: str, i: int, j: int, n: int) -> int:
    return RANK[family] * n * n + i * n + j


def decode(c: int, n: int) -> tuple[int, int, int]:
    rank, rest = divmod(c, n * n)
    return rank, rest // n, rest % n


def word_key(w: tuple) -> tuple:
    return (len(w), w)


def letter_ordinals(n: int, order: dict | None = None) -> list[int]:
    """Ordinal of each letter code: family first, then row-major index pairs ascending or
    descending as ``order`` says."""
    order = DEFAULT_ORDER if order is None else order
    N = n * n
    out = []
    for rank in range(4):
        for idx in range(N):
            out.append(rank * N + (idx if order.get(rank, "asc") == "asc" else N - 1 - idx))
    return out


def make_word_key(letter_rank: list[int] | None):
    """Degree-lexicographic key for a given ordinal of each letter code."""
    if letter_rank is None:
        return word_key
    return lambda w: (len(w), tuple(letter_rank[c] for c in w))


# -- matrices with noncommutative entries ------------------------------------------------------


class NCMat:
    """Square matrix on V (x) V whose entries are word combinations (dicts)."""

    __slots__ = ("size", "entries")

    def __init__(self, size: int, entries: dict | None = None):
        self.size = size
        self.entries = entries or {}

    @classmethod
    def numeric(cls, m: SMat) -> "NCMat":
        return cls(m.nrows, {(r, c): {(): v} for r, c, v in m.items()})

    @classmethod
    def identity(cls, size: int) -> "NCMat":
        return cls(size, {(r, r): {(): ONE} for r in range(size)})

    @classmethod
    def generator(cls, rank: int, slot: int, n: int) -> "NCMat":
        """``G_1 = G (x) 1`` or ``G_2 = 1 (x) G`` for the letter family of ``rank``."""
        out = {}
        for a, b, c in itertools.product(range(n), repeat=3):
            letter = rank * n * n + a * n + b
            if slot == 1:
                out[(a * n + c, b * n + c)] = {(letter,): ONE}
            else:
                out[(c * n + a, c * n + b)] = {(letter,): ONE}
        return cls(n * n, out)

    def __matmul__(self, other: "NCMat") -> "NCMat":
        by_row: dict[int, list] = {}
        for (k, c), e in other.entries.items():
            by_row.setdefault(k, []).append((c, e))
        out: dict = {}
        for (r, k), e1 in self.entries.items():
            for c, e2 in by_row.get(k, ()):
                tgt = out.setdefault((r, c), {})
                for w1, c1 in e1.items():
                    for w2, c2 in e2.items():
                        w = w1 + w2
                        p = c1 * c2
                        s = tgt.get(w)
                        tgt[w] = p if s is None else s + p
        return NCMat(self.size, _clean(out))

    def _combine(self, other: "NCMat", sign: int) -> "NCMat":
        out = {k: dict(v) for k, v in self.entries.items()}
        for k, e in other.entries.items():
            tgt = out.setdefault(k, {})
            for w, c in e.items():
                s = tgt.get(w)
                tgt[w] = sign * c if s is None else s + sign * c
        return NCMat(self.size, _clean(out))

    def __add__(self, other: "NCMat") -> "NCMat":
        return self._combine(other, 1)

    def __sub__(self, other: "NCMat") -> "NCMat":
        return self._combine(other, -1)

    def scale(self, c) -> "NCMat":
        c = as_ratfunc(c)
        return NCMat(self.size, _clean({k: {w: c * v for w, v in e.items()} for k, e in self.entries.items()}))

    def is_zero(self) -> bool:
        return not self.entries

    def relations(self) -> list[dict]:
        return [self.entries[k] for k in sorted(self.entries)]


def _clean(entries: dict) -> dict:
    out = {}
    for k, e in entries.items():
        e = {w: c for w, c in e.items() if not c.is_zero()}
        if e:
            out[k] = e
    return out


# -- relation families ---------------------------------------------------------------------------

FAMILY_LABELS = ("(106)", "(107)", "(108)", "(109)", "(110)", "(111)", "(112)", "(113)", "(114)", "(115)")


@dataclass(frozen=True)
class _Mats:
    R: NCMat
    Rinv: NCMat
    R21: NCMat
    R21inv: NCMat
    one: NCMat
    lam: RatFunc


def _mats(bundle: RBundle) -> _Mats:
    N = bundle.n * bundle.n
    return _Mats(
        NCMat.numeric(bundle.mat("R")),
        NCMat.numeric(bundle.mat("Rinv")),
        NCMat.numeric(bundle.mat("R21")),
        NCMat.numeric(bundle.mat("R21inv")),
        NCMat.identity(N),
        bundle.lam,
    )


def relation_family(bundle: RBundle, label: str, middle: str = "Y") -> NCMat:
    """LHS - RHS of one matrix relation, selected by its report label.

    With ``middle="X"``, Y is replaced by 1 - lambda X, except for the quantum Lie algebra
    family, which is already written in X."""
    n = bundle.n
    m = _mats(bundle)
    R, Rinv, R21, R21inv, one, lam = m.R, m.Rinv, m.R21, m.R21inv, m.one, m.lam
    gen = NCMat.generator
    T1, T2 = gen(0, 1, n), gen(0, 2, n)
    W1, W2 = gen(1, 1, n), gen(1, 2, n)
    J1, J2 = gen(3, 1, n), gen(3, 2, n)
    if middle == "Y":
        Y1, Y2 = gen(2, 1, n), gen(2, 2, n)
    else:
        Y1 = one - gen(2, 1, n).scale(lam)
        Y2 = one - gen(2, 2, n).scale(lam)
    if label == "(106)":
        return R @ T1 @ T2 - T2 @ T1 @ R
    if label == "(107)":
        return W1 @ T2 - T2 @ Rinv @ W1 @ R21inv
    if label == "(108)":
        return W1 @ R21inv @ W2 @ R21 + R21inv @ W2 @ Rinv @ W1
    if label == "(109)":
        return Y1 @ T2 - T2 @ R21 @ Y1 @ R
    if label == "(110)":
        return W1 @ R @ Y2 @ R21 - R @ Y2 @ R21 @ W1
    if label == "(111)":
        return J1 @ T2 - T2 @ R21 @ J1 @ R
    if label == "(112)":
        return W1 @ R @ J2 @ R21 + R @ J2 @ R21 @ W1 - (one - R @ R21).scale(lam.inverse())
    if label == "(113)":
        return Y1 @ R @ Y2 @ R21 - R @ Y2 @ R21 @ Y1
    if label == "(114)":
        return J1 @ R @ Y2 @ R21 - R @ Y2 @ R21 @ J1
    if label == "(115)":
        return J1 @ R @ J2 @ R21 + R21inv @ J2 @ R21 @ J1
    if label == "(116)":
        X1, X2 = gen(2, 1, n), gen(2, 2, n)
        return X1 @ R @ X2 @ R21 - R @ X2 @ R21 @ X1 - (X1 @ R @ R21 - R @ R21 @ X1).scale(lam.inverse())
    raise KeyError(label)


def _leading_pair(label: str) -> tuple[int, int]:
    return {
        "(106)": (0, 0),
        "(107)": (1, 0),
        "(108)": (1, 1),
        "(109)": (2, 0),
        "(110)": (2, 1),
        "(111)": (3, 0),
        "(112)": (3, 1),
        "(113)": (2, 2),
        "(114)": (3, 2),
        "(115)": (3, 3),
        "(116)": (2, 2),
    }[label]


# -- rule sets -------------------------------------------------------------------------------------


@dataclass
class RuleSet:
    n: int
    middle: str
    rules: dict  # (a, b) -> tuple[(word, coeff), ...]
    family_of: dict  # (a, b) -> label
    families: dict  # label -> list of relation dicts
    fuel: int = DEFAULT_FUEL
    ordinals: list = field(default_factory=list)
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def key(self):
        return make_word_key(self.ordinals)

    def letters(self) -> list[int]:
        return list(range(4 * self.n * self.n))

    def family_rules(self, label: str) -> dict:
        return {k: v for k, v in self.rules.items() if self.family_of[k] == label}

    def normal_words(self, rank_a: int, rank_b: int) -> list[tuple]:
        N = self.n * self.n
        out = []
        for a in range(rank_a * N, rank_a * N + N):
            for b in range(rank_b * N, rank_b * N + N):
                if (a, b) not in self.rules:
                    out.append((a, b))
        return out


def _orient(label: str, relations: list[dict], n: int, key) -> dict:
    cols = sorted({w for rel in relations for w in rel}, key=key, reverse=True)
    reduced, pivots = rref(relations, cols)
    ra, rb = _leading_pair(label)
    N = n * n
    rules = {}
    for row, piv in zip(reduced, pivots):
        if len(piv) != 2 or piv[0] // N != ra or piv[1] // N != rb:
            raise RuleError(f"relation family {label} has a pivot outside its leading pair: {piv}", label)
        rules[piv] = tuple((w, -c) for w, c in sorted(row.items(), key=lambda t: key(t[0]), reverse=True) if w != piv)
    if ra != rb:
        expected = {(a, b) for a in range(ra * N, ra * N + N) for b in range(rb * N, rb * N + N)}
        if set(rules) != expected:
            missing = sorted(expected - set(rules))
            raise RuleError(f"relation family {label} is not invertible on its misordered products (missing {missing[:3]})", label)
    return rules


def build_rules(bundle: RBundle, middle: str = "Y", fuel: int | None = None, order: dict | None = None) -> RuleSet:
    """Instantiate all ten relation families as rewriting rules.

    ``middle="X"`` builds the presentation with X in place of Y (Y = 1 - lambda X), using the
    quantum Lie algebra relations for the X-X family.  ``order`` maps a family rank to
    ``"asc"`` or ``"desc"`` for the index order inside that family.
    """
    if middle not in ("Y", "X"):
        raise ValueError("middle must be 'Y' or 'X'")
    n = bundle.n
    if fuel is None:
        fuel = int(os.environ.get("QGX_FUEL", DEFAULT_FUEL))
    ordinals = letter_ordinals(n, order)
    key = make_word_key(ordinals)
    rules: dict = {}
    family_of: dict = {}
    families: dict = {}
    for label in FAMILY_LABELS:
        use = "(116)" if (middle == "X" and label == "(113)") else label
        rels = relation_family(bundle, use, middle).relations()
        families[use] = rels
        for k, v in _orient(use, rels, n, key).items():
            rules[k] = v
            family_of[k] = use
    return RuleSet(n, middle, rules, family_of, families, fuel, ordinals)


# -- normal form -------------------------------------------------------------------------------------


def _find_redex(w: tuple, rules: dict, strategy: str, ordinals=None) -> int | None:
    best = None
    best_pair = None
    for p in range(len(w) - 1):
        pair = (w[p], w[p + 1])
        if pair in rules:
            if strategy == "leftmost":
                return p
            if strategy == "rightmost":
                best = p
                continue
            ranked = (ordinals[pair[0]], ordinals[pair[1]]) if ordinals else pair
            if best is None or ranked > best_pair:
                best, best_pair = p, ranked
    return best


def _nf_word(w: tuple, rs: RuleSet, strategy: str, budget: list) -> dict:
    memo = rs._memo.setdefault(strategy, {})
    hit = memo.get(w)
    if hit is not None:
        return hit
    rules = rs.rules
    key = rs.key
    result: dict = {}
    pending: dict = {w: ONE}
    while pending:
        u = max(pending, key=key)
        c = pending.pop(u)
        if c.is_zero():
            continue
        known = memo.get(u)
        if known is not None:
            for v, d in known.items():
                s = result.get(v)
                result[v] = c * d if s is None else s + c * d
            continue
        p = _find_redex(u, rules, strategy, rs.ordinals)
        if p is None:
            s = result.get(u)
            result[u] = c if s is None else s + c
            continue
        budget[0] -= 1
        if budget[0] < 0:
            raise FuelExhausted(w, budget[1])
        pre, post = u[:p], u[p + 2 :]
        for mid, d in rules[(u[p], u[p + 1])]:
            v = pre + mid + post
            s = pending.get(v)
            pending[v] = c * d if s is None else s + c * d
    result = {v: c for v, c in result.items() if not c.is_zero()}
    memo[w] = result
    return result


def normal_form(e: NCElem, rules: RuleSet, strategy: str = "highest", fuel: int | None = None) -> NCElem:
    """Rewrite until no adjacent pair is reducible.

    ``strategy`` picks the redex: ``highest`` (largest reducible pair, the default),
    ``leftmost`` or ``rightmost``.
    """
    if strategy not in ("highest", "leftmost", "rightmost"):
        raise ValueError(f"unknown strategy {strategy!r}")
    limit = rules.fuel if fuel is None else fuel
    budget = [limit, limit]
    out: dict = {}
    for w, c in e.terms.items():
        for v, d in _nf_word(w, rules, strategy, budget).items():
            s = out.get(v)
            out[v] = c * d if s is None else s + c * d
    return NCElem(out)


def mul(e1: NCElem, e2: NCElem, rules: RuleSet) -> NCElem:
    return normal_form(e1 * e2, rules)


def is_normal(e: NCElem, rules: RuleSet) -> bool:
    return all(_find_redex(w, rules.rules, "leftmost") is None for w in e.terms)


# -- diagnostics ----------------------------------------------------------------------------------------


def _nf_dict(terms: Iterable[tuple[tuple, RatFunc]], rules: RuleSet) -> dict:
    acc: dict = {}
    for w, c in terms:
        s = acc.get(w)
        acc[w] = c if s is None else s + c
    return normal_form(NCElem(acc), rules).terms


def check_overlaps(rules: RuleSet, degree: int = 3, word_text=None) -> list[CheckResult]:
    """Resolve every overlap ``abc`` of two reducible pairs both ways and compare.

    Only degree 3 ambiguities exist for a quadratic system; ``degree`` is accepted for the
    record.  One result per family pair of the overlapping rules.
    """
    word_text = word_text or (lambda w: str(w))
    by_first: dict[int, list] = {}
    for a, b in rules.rules:
        by_first.setdefault(a, []).append(b)
    failures: dict = {}
    seen: dict = {}
    for (a, b), rhs_ab in rules.rules.items():
        for c in by_first.get(b, ()):
            rhs_bc = rules.rules[(b, c)]
            key = f"{rules.family_of[(a, b)]}/{rules.family_of[(b, c)]}"
            seen[key] = True
            left = _nf_dict(((w + (c,), d) for w, d in rhs_ab), rules)
            right = _nf_dict((((a,) + w, d) for w, d in rhs_bc), rules)
            if left != right and key not in failures:
                failures[key] = word_text((a, b, c))
    out = []
    for key in sorted(seen):
        out.append(CheckResult(f"overlap {key}", key not in failures, degree, failures.get(key)))
    return out


def relations_vanish(rules: RuleSet, word_text=None) -> list[CheckResult]:
    """Every scalar relation of every family normal-forms to zero."""
    word_text = word_text or (lambda w: str(w))
    out = []
    for label, rels in rules.families.items():
        bad = None
        for rel in rels:
            if not normal_form(NCElem(dict(rel)), rules).is_zero():
                bad = "relation with leading word " + word_text(max(rel, key=rules.key))
                break
        out.append(CheckResult(label, bad is None, 2, bad))
    return out


def substitute(e: NCElem, n: int, rank: int, image: dict) -> NCElem:
    """Replace every letter of ``rank`` by ``image[(row, col)]`` (an NCElem)."""
    out = NCElem()
    for w, c in e.terms.items():
        acc = NCElem({(): c})
        for letter in w:
            r, i, j = decode(letter, n)
            acc = acc * (image[(i, j)] if r == rank else NCElem({(letter,): ONE}))
        out = out + acc
    return out


def quantum_lie_check(bundle: RBundle, y_rules: RuleSet | None = None, x_rules: RuleSet | None = None) -> list[CheckResult]:
    """The reflection equation in Y and the quantum Lie algebra in X describe the same ideal."""
    n = bundle.n
    lam = bundle.lam
    y_rules = y_rules or build_rules(bundle, "Y")
    x_rules = x_rules or build_rules(bundle, "X")
    out = []
    # the reflection equation after Y = 1 - lambda X is lambda^2 times the quantum Lie algebra,
    # entry by entry in the free algebra
    subst = relation_family(bundle, "(113)", middle="X")
    direct = relation_family(bundle, "(116)").scale(lam * lam)
    diff = subst - direct
    out.append(CheckResult("(116) from (113)", diff.is_zero(), 2, None if diff.is_zero() else str(min(diff.entries))))
    # each presentation normal-forms the other's relations to zero
    bad = None
    for rel in relation_family(bundle, "(113)", middle="X").relations():
        if not normal_form(NCElem(dict(rel)), x_rules).is_zero():
            bad = "(113) modulo (116)"
            break
    if bad is None:
        inv = lam.inverse()
        image = {
            (i, j): NCElem({(): inv} if i == j else {}) - NCElem.letter("Y", i, j, n).scale(inv) for i, j in itertools.product(range(n), repeat=2)
        }
        for rel in relation_family(bundle, "(116)").relations():
            y_form = substitute(NCElem(dict(rel)), n, 2, image)
            if not normal_form(y_form, y_rules).is_zero():
                bad = "(116) modulo (113)"
                break
    out.append(CheckResult("(113) <-> (116) ideals", bad is None, 2, bad))
    # classical limit: [X^i_k, X^j_l] = delta^j_k X^i_l - delta^i_l X^j_k
    classical = []
    for i, k, j, l in itertools.product(range(n), repeat=4):
        rel = {}

        def add(w, c):
            rel[w] = rel.get(w, ZERO) + as_ratfunc(c)

        add((code("X", i, k, n), code("X", j, l, n)), 1)
        add((code("X", j, l, n), code("X", i, k, n)), -1)
        if j == k:
            add((code("X", i, l, n),), -1)
        if i == l:
            add((code("X", j, k, n),), 1)
        classical.append({w: c for w, c in rel.items() if not c.is_zero()})
    try:
        at_one = [{w: as_ratfunc(eval_at(c, 1)) for w, c in rel.items()} for rel in relation_family(bundle, "(116)").relations()]
        at_one = [{w: c for w, c in rel.items() if not c.is_zero()} for rel in at_one]
        same = _same_span(at_one, classical)
        out.append(CheckResult("(116) at q=1 is gl(n)", same, 2, None if same else "spans differ"))
    except ArithmeticError as exc:
        out.append(CheckResult("(116) at q=1 is gl(n)", False, 2, f"pole: {exc}"))
    return out


def _same_span(a: list[dict], b: list[dict]) -> bool:
    cols = sorted({w for rel in a + b for w in rel}, key=word_key, reverse=True)
    ra, pa = rref([r for r in a if r], cols)
    rb, pb = rref([r for r in b if r], cols)
    return pa == pb and ra == rb


# -- coactions ----------------------------------------------------------------------------------------------


def _coact_letter(letter: int, n: int, side: str) -> list[tuple[tuple, tuple, RatFunc]]:
    """Image of one letter as ``[(A-word, G-word, coeff)]``."""
    rank, i, j = decode(letter, n)
    if rank == 0:
        return [((ALetter(0, i, k) if side == "left" else ALetter(0, k, j),), (code("T", k, j, n) if side == "left" else code("T", i, k, n),), ONE) for k in range(n)]
    if side == "left":
        return [((), (letter,), ONE)]
    N = n * n
    return [
        ((ALetter(1, i, k), ALetter(0, l, j)), (rank * N + k * n + l,), ONE) for k, l in itertools.product(range(n), repeat=2)
    ]


def coact(rel: dict, n: int, side: str) -> dict:
    """Multiplicative extension of the left or right coaction: ``{(A-word, G-word): coeff}``."""
    out: dict = {}
    for w, c in rel.items():
        partial = {((), ()): c}
        for letter in w:
            nxt: dict = {}
            for aw, gw, d in _coact_letter(letter, n, side):
                for (pa, pg), v in partial.items():
                    k = (pa + aw, pg + gw)
                    s = nxt.get(k)
                    nxt[k] = v * d if s is None else s + v * d
            partial = nxt
        for k, v in partial.items():
            s = out.get(k)
            out[k] = v if s is None else s + v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _a_leg_zero(a: dict, n: int, rules: RuleSet, engine: PairingEngine | None, degree: int) -> tuple[bool, str | None]:
    if all(l.power == 0 for w in a for l in w):
        as_nc = NCElem({tuple(code("T", l.row, l.col, n) for l in w): c for w, c in a.items()})
        ok = normal_form(as_nc, rules).is_zero()
        return ok, None if ok else "nonzero in the RTT normal form"
    if engine is None:
        raise ValueError("a pairing engine is needed for A-legs containing S(t)")
    return engine.a_is_zero(AElem(a), degree)


def coaction_check(rules: RuleSet, bundle: RBundle, engine: PairingEngine | None = None, degree: int = 3, labels=None) -> list[CheckResult]:
    """Left and right coaction images of every relation normal-form to zero."""
    n = rules.n
    engine = engine or PairingEngine(bundle)
    out = []
    for side in ("left", "right"):
        for label, rels in rules.families.items():
            if labels and label not in labels:
                continue
            witness = None
            for rel in rels:
                image = coact(rel, n, side)
                by_aword: dict = {}
                for (aw, gw), c in image.items():
                    by_aword.setdefault(aw, {})[gw] = c
                grouped: dict = {}
                for aw, g in by_aword.items():
                    for gw, c in normal_form(NCElem(g), rules).terms.items():
                        tgt = grouped.setdefault(gw, {})
                        tgt[aw] = tgt.get(aw, ZERO) + c
                for gw in sorted(grouped, key=rules.key):
                    a = {k: v for k, v in grouped[gw].items() if not v.is_zero()}
                    if not a:
                        continue
                    ok, w = _a_leg_zero(a, n, rules, engine, degree)
                    if not ok:
                        witness = f"G-word {gw}: {w}"
                        break
                if witness:
                    break
            out.append(CheckResult(f"{label} {side} coaction", witness is None, degree, witness))
    return out


def grade_signature(w: tuple, n: int) -> tuple[int, int]:
    """(number of T letters, number of Omega and J letters)."""
    N = n * n
    t = sum(1 for c in w if c // N == 0)
    odd = sum(1 for c in w if c // N in (1, 3))
    return t, odd
