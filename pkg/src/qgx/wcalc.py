"""Differential forms on GL_q(n): exterior derivative, graded coproduct, Lie derivatives and
inner derivations.

A form is a word combination in the letters ``t`` (rank 0) and ``Omega`` (rank 1) of
:mod:`qgx.ncalg`, kept in normal form by the T/Omega rules of a rule set.  Its wedge grade
is the number of Omega letters.  The basis 1-form omega^I for a doubled index I = (a, b) is
the letter Omega^a_b; with this identification ``dt^i_j = t^i_k Omega^k_j`` is exactly
``da = (chi_I |> a) omega^I`` because ``<chi_(a,b), t^k_l> = delta^k_a delta^b_l``.

Coproduct of letters, extended multiplicatively with the graded tensor product
``(a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd``::

    D t^i_j    = t^i_k (x) t^k_j
    D Omega^I  = 1 (x) Omega^I + Omega^K (x) r^I_K        r^I_K = S(t^i_k) t^l_j

A functional x acts by ``x |> rho = (-1)^{|x||rho_(1)|} rho_(1) <x, rho_(2)>``.  Elements of
A* pair with grade-0 right legs through :class:`qgx.hopfpair.PairingEngine`.  The
inner-derivation functionals are defined only by their brackets with grade-1 words::

    <gamma_I,  a omega^J b> = eps(a) <f^J_I, b>
    <gamma~_I, a omega^J b> = <phi^J_I, a> eps(b)

(these follow from ``omega^J b = (f^J_K |> b) omega^K`` and ``a omega^J = omega^K (phi^J_K |> a)``,
both of which are checked against the rewriting rules).  Products of two functionals pair
with ``<x y, rho> = (-1)^{|y||rho_(1)|} <x, rho_(1)> <y, rho_(2)>``.

Relations of the cross-product algebra that involve functionals are verified as operator
identities: forms act on forms by left multiplication and functionals by ``|>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .hopfpair import ALetter, AElem, DualElem, PairingEngine, generator_functionals, verify_tilded_functionals
from .ncalg import NCElem, RuleSet, build_rules, code, decode, normal_form
from .linalg import SMat
from .qfield import ONE, ZERO, RatFunc
from .report import CheckResult
from .rtensor import RBundle, StructureConstants, derive_constants

__all__ = [
    "FormElem",
    "Gamma",
    "OmegaLetter",
    "GradeOverflow",
    "FormCalculus",
    "FormTwoLeg",
    "DEFAULT_GRADE_CAP",
]

DEFAULT_GRADE_CAP = 3


class GradeOverflow(ValueError):
    """A form would exceed the configured wedge-grade cap."""

    def __init__(self, grade: int, cap: int):
        super().__init__(f"wedge grade {grade} exceeds the cap {cap}")
        self.grade = grade
        self.cap = cap


class OmegaLetter(NamedTuple):
    """omega^index inside a coproduct leg (index is a flattened doubled index)."""

    index: int


@dataclass(frozen=True)
class Gamma:
    """Inner-derivation functional gamma_index, or gamma~_index when ``tilde``."""

    index: int
    tilde: bool = False


Functional = Union[DualElem, Gamma]


class FormElem(NCElem):
    __slots__ = ()

    def grades(self, n: int) -> set[int]:
        N = n * n
        return {sum(1 for c in w if N <= c < 2 * N) for w in self.terms}

    def grade(self, n: int) -> int:
        """Highest wedge grade present (0 for the zero form)."""
        return max(self.grades(n), default=0)


class FormTwoLeg:
    """``{(left form word, right mixed word): coeff}``; right words hold ALetter and OmegaLetter."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    def __eq__(self, other):
        return isinstance(other, FormTwoLeg) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)


def _is_omega(x) -> bool:
    return isinstance(x, OmegaLetter)


def _eps(word: Iterable[ALetter]) -> RatFunc:
    for l in word:
        if l.row != l.col:
            return ZERO
    return ONE


class FormCalculus:
    """Forms, d, coproduct and actions for one R-matrix bundle."""

    def __init__(
        self,
        bundle: RBundle,
        rules: RuleSet | None = None,
        engine: PairingEngine | None = None,
        constants: StructureConstants | None = None,
        grade_cap: int = DEFAULT_GRADE_CAP,
        self_test: bool = True,
    ):
        if not 1 <= grade_cap <= 3:
            raise ValueError("grade cap must be between 1 and 3")
        self.bundle = bundle
        self.n = bundle.n
        self.N = self.n * self.n
        self.rules = rules if rules is not None else build_rules(bundle, "Y")
        if self.rules.middle != "Y":
            raise ValueError("forms need the rule set built with Y")
        self.engine = engine or PairingEngine(bundle)
        self.fam = self.engine.functionals()
        self._constants = constants
        self.cap = grade_cap
        self._rep_cache: dict = {}
        if self_test:
            self._replay_d_omega()

    @property
    def constants(self) -> StructureConstants:
        if self._constants is None:
            self._constants = derive_constants(self.bundle, self.engine)
        return self._constants

    # -- letters ----------------------------------------------------------------------------
    def t(self, i: int, j: int) -> FormElem:
        return FormElem({(code("T", i, j, self.n),): ONE})

    def omega(self, I: int) -> FormElem:
        """omega^I = Omega^a_b for I = (a, b)."""
        return FormElem({(self.N + I,): ONE})

    def one(self) -> FormElem:
        return FormElem.unit()

    def nf(self, e: NCElem) -> FormElem:
        N = self.N
        for w in e.terms:
            if any(c >= 2 * N for c in w):
                raise ValueError("forms contain only t and Omega letters")
        g = FormElem(e.terms).grade(self.n)
        if g > self.cap:
            raise GradeOverflow(g, self.cap)
        return FormElem(normal_form(e, self.rules).terms)

    def mul(self, *factors: NCElem) -> FormElem:
        acc = FormElem.unit()
        for f in factors:
            acc = acc * f
        return self.nf(acc)

    def _word_grade(self, w: tuple) -> int:
        N = self.N
        return sum(1 for c in w if N <= c < 2 * N)

    # -- exterior derivative ---------------------------------------------------------------------
    def _d_letter(self, letter: int) -> list[tuple[tuple, RatFunc]]:
        n, N = self.n, self.N
        rank, i, j = decode(letter, n)
        if rank == 0:
            return [((code("T", i, k, n), N + k * n + j), ONE) for k in range(n)]
        return [((N + i * n + k, N + k * n + j), -ONE) for k in range(n)]

    def differential(self, e: NCElem) -> FormElem:
        """Graded derivation with ``dt = t Omega`` and ``dOmega = -Omega Omega``."""
        g = FormElem(e.terms).grade(self.n)
        if e.terms and g + 1 > self.cap:
            raise GradeOverflow(g + 1, self.cap)
        out: dict = {}
        N = self.N
        for w, c in e.terms.items():
            before = 0
            for p, letter in enumerate(w):
                sign = -c if before % 2 else c
                for repl, d in self._d_letter(letter):
                    k = w[:p] + repl + w[p + 1 :]
                    s = out.get(k)
                    out[k] = sign * d if s is None else s + sign * d
                if N <= letter < 2 * N:
                    before += 1
        return self.nf(FormElem(out))

    def _replay_d_omega(self) -> None:
        # d(dT) = d(T Omega) = T Omega Omega + T dOmega, so T invertible forces dOmega = -Omega Omega;
        # replay the consequence d(d t) = 0 on every coordinate letter
        if self.cap < 2:
            return
        for i, j in itertools.product(range(self.n), repeat=2):
            if not self.differential(self.differential(self.t(i, j))).is_zero():
                raise RuntimeError(f"d(d t[{i + 1},{j + 1}]) does not vanish in normal form")

    # -- coproduct -------------------------------------------------------------------------------
    def _letter_coproduct(self, letter: int) -> list[tuple[tuple, tuple, RatFunc]]:
        n, N = self.n, self.N
        rank, i, j = decode(letter, n)
        if rank == 0:
            return [((code("T", i, k, n),), (ALetter(0, k, j),), ONE) for k in range(n)]
        if rank != 1:
            raise ValueError("forms contain only t and Omega letters")
        I = letter - N
        out = [((), (OmegaLetter(I),), ONE)]
        for k, l in itertools.product(range(n), repeat=2):
            out.append(((N + k * n + l,), (ALetter(1, i, k), ALetter(0, l, j)), ONE))
        return out

    def _word_coproduct(self, w: tuple, max_right: int | None = None) -> dict:
        partial: dict = {((), ()): ONE}
        for letter in w:
            nxt: dict = {}
            for a, b, d in self._letter_coproduct(letter):
                a_grade = self._word_grade(a)
                b_grade = sum(1 for x in b if _is_omega(x))
                for (L, R), v in partial.items():
                    r_grade = sum(1 for x in R if _is_omega(x))
                    if max_right is not None and r_grade + b_grade > max_right:
                        continue
                    coeff = v * d
                    if r_grade * a_grade % 2:
                        coeff = -coeff
                    k = (L + a, R + b)
                    s = nxt.get(k)
                    nxt[k] = coeff if s is None else s + coeff
            partial = nxt
        return partial

    def graded_coproduct(self, e: NCElem) -> FormTwoLeg:
        out: dict = {}
        for w, c in e.terms.items():
            for k, v in self._word_coproduct(w).items():
                s = out.get(k)
                out[k] = c * v if s is None else s + c * v
        return FormTwoLeg(out)

    # -- brackets --------------------------------------------------------------------------------
    def pair_a(self, x: DualElem, word: tuple) -> RatFunc:
        """``<x, a>`` for a word of A-letters, with cached representation matrices."""
        if not word:
            return self.engine.counit(x)
        pattern, I, J = self.engine.a_word_slot(word)
        key = (x, pattern)
        m = self._rep_cache.get(key)
        if m is None:
            m = self.engine.represent(x, pattern)
            self._rep_cache[key] = m
        return m[(I, J)]

    def bracket(self, x: Functional, right: tuple) -> RatFunc:
        """Bracket of a functional with one mixed word of A-letters and OmegaLetters."""
        omegas = [p for p, y in enumerate(right) if _is_omega(y)]
        if isinstance(x, Gamma):
            if len(omegas) != 1:
                return ZERO
            p = omegas[0]
            a, J, b = right[:p], right[p].index, right[p + 1 :]
            if x.tilde:
                e = _eps(b)
                return e if e.is_zero() else self.pair_a(self.fam.phi[J][x.index], a)
            e = _eps(a)
            return e if e.is_zero() else self.pair_a(self.fam.f[J][x.index], b)
        if omegas:
            return ZERO
        return self.pair_a(x, right)

    def _as_mixed(self, w: tuple) -> tuple:
        n, N = self.n, self.N
        out = []
        for c in w:
            rank, i, j = decode(c, n)
            out.append(ALetter(0, i, j) if rank == 0 else OmegaLetter(c - N))
        return tuple(out)

    def pair_form(self, x: Functional, e: NCElem) -> RatFunc:
        acc = ZERO
        for w, c in e.terms.items():
            v = self.bracket(x, self._as_mixed(w))
            if not v.is_zero():
                acc = acc + c * v
        return acc

    def pair_product(self, x: Functional, y: Functional, e: NCElem) -> RatFunc:
        """``<x y, e> = (-1)^{|y||e_(1)|} <x, e_(1)> <y, e_(2)>``."""
        y_odd = isinstance(y, Gamma)
        acc = ZERO
        for w, c in e.terms.items():
            for (L, R), d in self._word_coproduct(w).items():
                vy = self.bracket(y, R)
                if vy.is_zero():
                    continue
                vx = self.bracket(x, self._as_mixed(L))
                if vx.is_zero():
                    continue
                v = c * d * vx * vy
                if y_odd and self._word_grade(L) % 2:
                    v = -v
                acc = acc + v
        return acc

    # -- actions --------------------------------------------------------------------------------
    def act_on_forms(self, x: Functional, e: NCElem) -> FormElem:
        """``x |> e``; Lie derivative for x in A*, inner derivation for a Gamma."""
        odd = isinstance(x, Gamma)
        out: dict = {}
        for w, c in e.terms.items():
            for (L, R), d in self._word_coproduct(w, 1 if odd else 0).items():
                v = self.bracket(x, R)
                if v.is_zero():
                    continue
                v = c * d * v
                if odd and self._word_grade(L) % 2:
                    v = -v
                s = out.get(L)
                out[L] = v if s is None else s + v
        return self.nf(FormElem(out))

    def lie(self, h: DualElem, e: NCElem) -> FormElem:
        return self.act_on_forms(h, e)

    def inner(self, I: int, e: NCElem, tilde: bool = False) -> FormElem:
        return self.act_on_forms(Gamma(I, tilde), e)

    # -- test families -------------------------------------------------------------------------
    def cartan_family(self) -> list[tuple[str, FormElem]]:
        """t, t dt and dt dt for all index choices."""
        n = self.n
        ts = [(f"t[{i + 1},{j + 1}]", self.t(i, j)) for i, j in itertools.product(range(n), repeat=2)]
        dts = [(f"dt[{i + 1},{j + 1}]", self.differential(self.t(i, j))) for i, j in itertools.product(range(n), repeat=2)]
        out = list(ts)
        out += [(f"{a}*{b}", self.mul(x, y)) for (a, x), (b, y) in itertools.product(ts, dts)]
        if self.cap >= 2:
            out += [(f"{a}*{b}", self.mul(x, y)) for (a, x), (b, y) in itertools.product(dts, dts)]
        return out

    def operator_family(self) -> list[tuple[str, FormElem]]:
        """Small forms used to test operator identities: 1, t, omega, dt and t omega."""
        n, N = self.n, self.N
        out = [("1", self.one())]
        out += [(f"t[{i + 1},{j + 1}]", self.t(i, j)) for i, j in itertools.product(range(n), repeat=2)]
        out += [(f"w[{I // n + 1},{I % n + 1}]", self.omega(I)) for I in range(N)]
        out += [(f"dt[{i + 1},{j + 1}]", self.differential(self.t(i, j))) for i, j in itertools.product(range(n), repeat=2)]
        out += [(f"t[{i + 1},{j + 1}]*w[{I // n + 1},{I % n + 1}]", self.mul(self.t(i, j), self.omega(I))) for i, j, I in [(0, 0, N - 1), (n - 1, 0, 0)]]
        return out

    def _sanity(self, e: NCElem) -> None:
        if FormElem(e.terms).grade(self.n) + 1 > self.cap:
            raise GradeOverflow(FormElem(e.terms).grade(self.n) + 1, self.cap)

    # -- identities on concrete forms -------------------------------------------------------------
    def cartan_residual(self, I: int, e: NCElem) -> FormElem:
        chi = self.fam.chi[I]
        g = Gamma(I)
        return self.act_on_forms(chi, e) - self.differential(self.act_on_forms(g, e)) - self.act_on_forms(g, self.differential(e))

    def check_cartan(self, e: NCElem) -> tuple[bool, str | None]:
        """``chi_I |> e = d(gamma_I |> e) + gamma_I |> de`` for every doubled index I."""
        self._sanity(e)
        for I in range(self.N):
            res = self.cartan_residual(I, e)
            if not res.is_zero():
                return False, f"I={_pair_text(I, self.n)}: residual {res}"
        return True, None

    def check_lie_d_commute(self, h: DualElem, e: NCElem) -> tuple[bool, str | None]:
        self._sanity(e)
        res = self.act_on_forms(h, self.differential(e)) - self.differential(self.act_on_forms(h, e))
        return (True, None) if res.is_zero() else (False, f"residual {res}")

    def check_d_squared(self, e: NCElem) -> tuple[bool, str | None]:
        if FormElem(e.terms).grade(self.n) + 2 > self.cap:
            raise GradeOverflow(FormElem(e.terms).grade(self.n) + 2, self.cap)
        res = self.differential(self.differential(e))
        return (True, None) if res.is_zero() else (False, f"d(d e) = {res}")

    def leibniz_residual(self, e1: NCElem, e2: NCElem) -> FormElem:
        g = FormElem(e1.terms).grade(self.n)
        if len(FormElem(e1.terms).grades(self.n)) > 1:
            raise ValueError("the Leibniz check needs a grade-homogeneous first factor")
        lhs = self.differential(self.mul(e1, e2))
        rhs = self.mul(self.differential(e1), e2) + self.mul(e1, self.differential(e2)).scale(-1 if g % 2 else 1)
        return lhs - rhs

    # -- report-level suites -------------------------------------------------------------------------
    def cartan_suite(self, degree: int = 3) -> list[CheckResult]:
        fam = self.fam
        n, N = self.n, self.N
        out = []
        # identities on e involve d e, so e may use at most cap - 1 wedge factors
        family = [(nm, e) for nm, e in self.cartan_family() if FormElem(e.terms).grade(n) + 1 <= self.cap]

        out.append(_first("(63)", ((family_name, self.check_cartan(e)) for family_name, e in family)))

        hs = [(f"chi[{_pair_text(I, n)}]", fam.chi[I]) for I in range(N)]
        hs += [(f"f[{_pair_text(I, n)};{_pair_text(J, n)}]", fam.f[I][J]) for I, J in itertools.product(range(N), repeat=2)]
        hs += generator_functionals(n)
        out.append(
            _first(
                "(58)",
                ((f"h={hn}, e={en}", self.check_lie_d_commute(h, e)) for hn, h in hs for en, e in family),
            )
        )

        def gamma_on_functions():
            for (en, e), I in itertools.product(family[: N], range(N)):
                if not self.inner(I, e).is_zero():
                    yield False, f"gamma_{_pair_text(I, n)} |> {en} != 0"
                lhs = self.inner(I, self.differential(e))
                rhs = self.act_on_forms(fam.chi[I], e)
                if lhs != rhs:
                    yield False, f"gamma_{_pair_text(I, n)} |> d{en} != chi |> {en}"
            yield True, None

        ok, w = _first_failure(gamma_on_functions())
        out.append(CheckResult("(64)", ok, None, w))
        out += self.exterior_suite()
        out += self.dstar_suite(degree)
        return out

    def exterior_suite(self) -> list[CheckResult]:
        n = self.n
        out = []
        forms = self.cartan_family()
        ones = [(nm, e) for nm, e in forms if FormElem(e.terms).grade(n) + 2 <= self.cap]
        out.append(_first("d^2 = 0", ((nm, self.check_d_squared(e)) for nm, e in ones)))

        def leibniz():
            small = [(nm, e) for nm, e in self.operator_family() if FormElem(e.terms).grade(n) <= 1]
            for (n1, e1), (n2, e2) in itertools.product(small, repeat=2):
                if FormElem(e1.terms).grade(n) + FormElem(e2.terms).grade(n) + 1 > self.cap:
                    continue
                res = self.leibniz_residual(e1, e2)
                if not res.is_zero():
                    yield False, f"{n1} , {n2}: {res}"
            yield True, None

        ok, w = _first_failure(leibniz())
        out.append(CheckResult("Leibniz", ok, None, w))

        def relations_closed():
            # d maps each t/Omega relation into the ideal
            for label in ("(106)", "(107)", "(108)"):
                for rel in self.rules.families[label]:
                    e = FormElem(rel)
                    if FormElem(e.terms).grade(n) + 1 > self.cap:
                        continue
                    if not self.differential(e).is_zero():
                        yield False, f"d of a {label} relation is nonzero"
            yield True, None

        ok, w = _first_failure(relations_closed())
        out.append(CheckResult("d on relations", ok, None, w))
        return out

    def dstar_suite(self, degree: int = 3) -> list[CheckResult]:
        """``<gamma_I, da> = <chi_I, a>`` for t-words and the d*-bridge on ``a db``."""
        n, N = self.n, self.N
        fam = self.fam
        words = [()]
        for m in range(1, degree + 1):
            words += [
                tuple(code("T", idx[2 * r], idx[2 * r + 1], n) for r in range(m)) for idx in itertools.product(range(n), repeat=2 * m)
            ]

        def chi_of(I, w):
            return self.pair_a(fam.chi[I], self._as_mixed(w))

        def dstar():
            for w in words:
                da = self.differential(FormElem({w: ONE})) if w else FormElem()
                for I in range(N):
                    lhs = self.pair_form(Gamma(I), da)
                    rhs = chi_of(I, w)
                    if lhs != rhs:
                        yield False, f"I={_pair_text(I, n)}, a={self._word_text(w)}: {lhs} != {rhs}"
            yield True, None

        ok, w = _first_failure(dstar())
        out = [CheckResult("(38)", ok, degree, w)]

        def bridge():
            # <gamma_I, a db> against <<chi_I, a db>> = eps(a) <chi_I, b>
            for wa, wb in itertools.product(words, repeat=2):
                if not wb or len(wa) + len(wb) > degree:
                    continue
                rho = self.mul(FormElem({wa: ONE}), self.differential(FormElem({wb: ONE})))
                e = _eps(self._as_mixed(wa))
                for I in range(N):
                    lhs = self.pair_form(Gamma(I), rho)
                    rhs = e * chi_of(I, wb) if not e.is_zero() else ZERO
                    if lhs != rhs:
                        yield False, f"I={_pair_text(I, n)}, a={self._word_text(wa)}, b={self._word_text(wb)}"
            yield True, None

        ok, w = _first_failure(bridge())
        out.append(CheckResult("(75)", ok, degree, w))
        return out

    def _word_text(self, w: tuple) -> str:
        if not w:
            return "1"
        parts = []
        for c in w:
            rank, i, j = decode(c, self.n)
            parts.append(f"{'tw'[rank]}[{i + 1},{j + 1}]")
        return "*".join(parts)

    # -- relations between functionals and forms ------------------------------------------------------
    def _dual_act(self, a: AElem, h: DualElem) -> DualElem:
        return self.engine.dual_left_by(a, h)

    def gamma_relations(self) -> list[CheckResult]:
        """Exchange relations between gamma, forms and functionals, checked as operator identities,
        and the gamma-chi bracket."""
        n, N = self.n, self.N
        fam = self.fam
        sc = self.constants
        forms = self.operator_family()
        out = []
        ts = [self.t(i, j) for i, j in itertools.product(range(n), repeat=2)]

        def each_form(fn):
            for nm, rho in forms:
                if FormElem(rho.terms).grade(n) + 1 > self.cap:
                    continue
                res = fn(rho)
                if res is not None:
                    return False, f"{res} on {nm}"
            return True, None

        def r44(rho):
            for I, a in itertools.product(range(N), ts):
                if self.inner(I, self.mul(a, rho)) != self.mul(a, self.inner(I, rho)):
                    return f"I={_pair_text(I, n)}"

        out.append(CheckResult("(44)", *each_form(r44)))

        def r46(rho):
            for I, J in itertools.product(range(N), repeat=2):
                lhs = self.inner(I, self.mul(self.omega(J), rho)) + self.mul(self.omega(J), self.inner(I, rho))
                if lhs != self.act_on_forms(fam.f[J][I], rho):
                    return f"i={_pair_text(I, n)}, j={_pair_text(J, n)}"

        out.append(CheckResult("(46)", *each_form(r46)))

        def r47(rho):
            for (hn, h), I in itertools.product(generator_functionals(n), range(N)):
                lhs = self.inner(I, self.act_on_forms(h, rho))
                rhs = FormElem()
                for J in range(N):
                    rhs = rhs + self.act_on_forms(self._dual_act(self.engine.r_elem(J, I), h), self.inner(J, rho))
                if lhs != rhs:
                    return f"h={hn}, i={_pair_text(I, n)}"

        out.append(CheckResult("(47)", *each_form(r47)))

        def r56(rho):
            for I, J in itertools.product(range(N), repeat=2):
                lhs = self.inner(I, self.act_on_forms(fam.chi[J], rho))
                for L, K in itertools.product(range(N), repeat=2):
                    s = sc.sigma[(I, J, L, K)]
                    if not s.is_zero():
                        lhs = lhs - self.act_on_forms(fam.chi[L], self.inner(K, rho)).scale(s)
                rhs = FormElem()
                for K in range(N):
                    c = sc.C[(I, J, K)]
                    if not c.is_zero():
                        rhs = rhs + self.inner(K, rho).scale(c)
                if lhs != rhs:
                    return f"i={_pair_text(I, n)}, j={_pair_text(J, n)}"

        out.append(CheckResult("(56)", *each_form(r56)))
        out.append(self.bracket_57())
        return out

    def _bracket_a_words(self) -> list[tuple]:
        n = self.n
        return [()] + [(code("T", i, j, n),) for i, j in itertools.product(range(n), repeat=2)]

    def bracket_57(self) -> CheckResult:
        """``<gamma_i gamma_j, a omega^m omega^n> = eps(a)(sigma_ij^mn - delta delta)``."""
        n, N = self.n, self.N
        sigma = self.constants.sigma
        for a in self._bracket_a_words():
            ea = _eps(self._as_mixed(a))
            for M, Nn in itertools.product(range(N), repeat=2):
                rho = FormElem({a + (N + M, N + Nn): ONE})
                for I, J in itertools.product(range(N), repeat=2):
                    got = self.pair_product(Gamma(I), Gamma(J), rho)
                    want = ea * (sigma[(I, J, M, Nn)] - (ONE if (I, J) == (M, Nn) else ZERO))
                    if got != want:
                        return CheckResult(
                            "(57)", False, None, f"i={_pair_text(I, n)} j={_pair_text(J, n)} m={_pair_text(M, n)} n={_pair_text(Nn, n)} a={self._word_text(a)}: {got} != {want}"
                        )
        return CheckResult("(57)", True)

    def bracket_89(self) -> CheckResult:
        """``<gamma~_i gamma~_j, omega^m omega^n a> = eps(a)(-sigma~_ji^mn + delta_j^m delta_i^n)``."""
        n, N = self.n, self.N
        st = self.constants.sigma_tilde
        for a in self._bracket_a_words():
            ea = _eps(self._as_mixed(a))
            for M, Nn in itertools.product(range(N), repeat=2):
                rho = FormElem({(N + M, N + Nn) + a: ONE})
                for I, J in itertools.product(range(N), repeat=2):
                    got = self.pair_product(Gamma(I, True), Gamma(J, True), rho)
                    want = ea * (-st[(J, I, M, Nn)] + (ONE if (J, I) == (M, Nn) else ZERO))
                    if got != want:
                        return CheckResult(
                            "(89)", False, None, f"i={_pair_text(I, n)} j={_pair_text(J, n)} m={_pair_text(M, n)} n={_pair_text(Nn, n)} a={self._word_text(a)}: {got} != {want}"
                        )
        return CheckResult("(89)", True)

    def tilded_convention(self, degree: int = 3) -> list[CheckResult]:
        """The alternative generators phi, chi~, gamma~ and their relations."""
        n, N = self.n, self.N
        fam = self.fam
        sc = self.constants
        st, Ct = sc.sigma_tilde, sc.C_tilde
        out = list(verify_tilded_functionals(self.engine, degree))

        def right_exchange():
            # a omega^J = omega^K (phi^J_K |> a)
            for i, j, J in itertools.product(range(n), range(n), range(N)):
                lhs = self.mul(self.t(i, j), self.omega(J))
                rhs = FormElem()
                for K in range(N):
                    rhs = rhs + self.mul(self.omega(K), self.act_on_forms(fam.phi[J][K], self.t(i, j)))
                if lhs != self.nf(rhs):
                    yield False, f"a=t[{i + 1},{j + 1}], J={_pair_text(J, n)}"
            yield True, None

        ok, w = _first_failure(right_exchange())
        out.append(CheckResult("(79)", ok, None, w))
        out.append(self._constants_route())

        forms = [(nm, rho) for nm, rho in self.operator_family() if FormElem(rho.terms).grade(n) + 1 <= self.cap]

        def gamma_tilde_from_gamma():
            # gamma~_i = w_{kj} gamma_j phi_i^k with the D-weights of gamma_tilde_weights
            coeff = self.gamma_tilde_weights()
            for (nm, rho), I in itertools.product(forms, range(N)):
                lhs = self.inner(I, rho, tilde=True)
                rhs = FormElem()
                for (K, J), c in coeff.items():
                    rhs = rhs + self.inner(J, self.act_on_forms(fam.phi[K][I], rho)).scale(c)
                if lhs != rhs:
                    yield False, f"i={_pair_text(I, n)} on {nm}"
            yield True, None

        ok, w = _first_failure(gamma_tilde_from_gamma())
        out.append(CheckResult("(80) gamma~", ok, None, w))

        ts = [(f"t[{i + 1},{j + 1}]", self.t(i, j)) for i, j in itertools.product(range(n), repeat=2)]

        def r83():
            for (nm, rho), (an, a), I in itertools.product(forms, ts, range(N)):
                lhs = self.inner(I, self.mul(a, rho), tilde=True)
                rhs = FormElem()
                for J in range(N):
                    rhs = rhs + self.mul(self.act_on_forms(fam.phi[J][I], a), self.inner(J, rho, tilde=True))
                if lhs != rhs:
                    yield False, f"i={_pair_text(I, n)}, a={an} on {nm}"
            yield True, None

        ok, w = _first_failure(r83())
        out.append(CheckResult("(83)", ok, None, w))

        def r84_85(tilde_gamma: bool):
            sign = 1 if tilde_gamma else -1
            for (nm, rho), I, J in itertools.product(forms, range(N), range(N)):
                x = Gamma(I, True) if tilde_gamma else fam.chi_tilde[I]
                lhs = self.act_on_forms(x, self.mul(self.omega(J), rho))
                for K, L in itertools.product(range(N), repeat=2):
                    s = st[(I, K, J, L)]
                    if s.is_zero():
                        continue
                    y = Gamma(L, True) if tilde_gamma else fam.chi_tilde[L]
                    lhs = lhs + self.mul(self.omega(K), self.act_on_forms(y, rho)).scale(s * sign)
                if tilde_gamma:
                    rhs = rho if I == J else FormElem()
                else:
                    rhs = FormElem()
                    for K in range(N):
                        c = Ct[(K, I, J)]
                        if not c.is_zero():
                            rhs = rhs + self.mul(self.omega(K), rho).scale(c)
                if self.nf(lhs) != self.nf(rhs):
                    yield False, f"i={_pair_text(I, n)}, j={_pair_text(J, n)} on {nm}"
            yield True, None

        ok, w = _first_failure(r84_85(False))
        out.append(CheckResult("(84)", ok, None, w))
        ok, w = _first_failure(r84_85(True))
        out.append(CheckResult("(85)", ok, None, w))

        def r87():
            for (nm, rho), I, J in itertools.product(forms, range(N), range(N)):
                lhs = self.inner(I, self.act_on_forms(fam.chi_tilde[J], rho), tilde=True)
                for K, L in itertools.product(range(N), repeat=2):
                    s = st[(J, I, K, L)]
                    if not s.is_zero():
                        lhs = lhs - self.act_on_forms(fam.chi_tilde[L], self.inner(K, rho, tilde=True)).scale(s)
                rhs = FormElem()
                for K in range(N):
                    c = Ct[(I, J, K)]
                    if not c.is_zero():
                        rhs = rhs + self.inner(K, rho, tilde=True).scale(c)
                if lhs != rhs:
                    yield False, f"i={_pair_text(I, n)}, j={_pair_text(J, n)} on {nm}"
            yield True, None

        ok, w = _first_failure(r87())
        out.append(CheckResult("(87)", ok, None, w))
        out.append(self.bracket_89())

        def r90():
            for (nm, rho), (hn, h), I in itertools.product(forms, generator_functionals(n), range(N)):
                lhs = self.inner(I, self.act_on_forms(h, rho), tilde=True)
                rhs = FormElem()
                for J in range(N):
                    hr = self.engine.dual_right_by(h, self.engine.r_elem(J, I))
                    rhs = rhs + self.act_on_forms(hr, self.inner(J, rho, tilde=True))
                if lhs != rhs:
                    yield False, f"h={hn}, i={_pair_text(I, n)} on {nm}"
            yield True, None

        ok, w = _first_failure(r90())
        out.append(CheckResult("(90) gamma~", ok, None, w))
        return out

    def gamma_tilde_weights(self) -> dict:
        """``{(K, J): w}`` with ``gamma~_i = w_{KJ} gamma_J phi_i^K``.

        ``w_{(a,b),(c,d)} = Dinv(a,c) D(d,b)``, which reduces to ``delta_KJ`` at q = 1.
        """
        n, N = self.n, self.N
        b = self.bundle
        out = {}
        for K, J in itertools.product(range(N), repeat=2):
            a, bb = divmod(K, n)
            c, d = divmod(J, n)
            w = b.dinv(a, c) * b.d(d, bb)
            if not w.is_zero():
                out[(K, J)] = w
        return out

    def sigma_trace_weights(self) -> dict:
        """``{(K, J): sigma_{mK}^{mJ}}`` (summed over m), the plain sigma-trace weights."""
        N = self.N
        sigma = self.constants.sigma
        out = {}
        for K, J in itertools.product(range(N), repeat=2):
            acc = ZERO
            for M in range(N):
                acc = acc + sigma[(M, K, M, J)]
            if not acc.is_zero():
                out[(K, J)] = acc
        return out

    def _constants_route(self) -> CheckResult:
        # sigma~ both as sigma^-1 (the stored tensor) and as <phi^i_j, r^k_l>
        sc = self.constants
        N = self.N
        S = SMat.from_entries(N * N, N * N, ((i * N + j, k * N + l, v) for (i, j, k, l), v in sc.sigma.entries.items()))
        St = SMat.from_entries(N * N, N * N, ((i * N + j, k * N + l, v) for (i, j, k, l), v in sc.sigma_tilde.entries.items()))
        if S @ St != SMat.identity(N * N):
            return CheckResult("(86)", False, None, "sigma~ is not the inverse of sigma")
        for j, l, k, i in itertools.product(range(N), repeat=4):
            v = self.engine.pair(self.fam.phi[i][j], self.engine.r_elem(k, l))
            if v != sc.sigma_tilde[(j, l, k, i)]:
                idx = ", ".join(_pair_text(x, self.n) for x in (j, l, k, i))
                return CheckResult("(86)", False, None, f"<phi, r> = {v} but sigma^-1 = {sc.sigma_tilde[(j, l, k, i)]} at ({idx})")
        return CheckResult("(86)", True, None, None, "sigma^-1 and <phi, r> agree")


def _pair_text(I: int, n: int) -> str:
    return f"({I // n + 1},{I % n + 1})"


def _first_failure(checks) -> tuple[bool, str | None]:
    for ok, w in checks:
        if not ok:
            return False, w
    return True, None


def _first(label: str, items) -> CheckResult:
    count = 0
    for name, (ok, w) in items:
        count += 1
        if not ok:
            return CheckResult(label, False, None, f"{name}: {w}")
    return CheckResult(label, True, None, None, None if count else "no test forms within the grade cap")
