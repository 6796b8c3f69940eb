"""Named verification suites shared by the command line and the acceptance tests."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

from .hopfpair import PairingEngine, verify_functional_relations, verify_woronowicz
from .dsl import word_text
from .linalg import SingularMatrixError
from .ncalg import DEFAULT_FUEL, FuelExhausted, RuleError, build_rules, check_overlaps, coaction_check, quantum_lie_check, relations_vanish
from .qfield import PoleError, as_ratfunc, eval_at
from .report import CheckResult
from .rtensor import (
    ConsistencyError,
    IndexedTensor,
    RBundle,
    build_r,
    derive_constants,
    hecke_witness,
    second_inverse,
    second_inverse_check,
    d_matrix,
    ybe_witness,
)
from .wcalc import DEFAULT_GRADE_CAP, FormCalculus

__all__ = ["Config", "Session", "SUITES", "run_suite", "classical_limit"]

SUITES = ("ybe", "hecke", "woronowicz", "relations", "overlaps", "cartan", "coactions", "tilded")

# failures of the algebraic setup are reported as failed checks, not crashes
_SETUP_ERRORS = (ConsistencyError, SingularMatrixError, RuleError, FuelExhausted, ArithmeticError, ValueError, RuntimeError)


def default_fuel() -> int:
    env = os.environ.get("QGX_FUEL")
    return int(env) if env else DEFAULT_FUEL


@dataclass(frozen=True)
class Config:
    n: int = 2
    degree: int = 3
    grade_cap: int = DEFAULT_GRADE_CAP
    fuel: int = field(default_factory=default_fuel)
    output_format: str = "text"
    r_file: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if not 1 <= self.grade_cap <= 3:
            raise ValueError("grade cap must be in 1..3")
        if self.fuel < 1:
            raise ValueError("fuel must be >= 1")
        if self.output_format not in ("text", "json"):
            raise ValueError("format must be text or json")


class Session:
    """Lazily built objects for one configuration; shared by all suites of a run."""

    def __init__(self, cfg: Config, R: IndexedTensor | None = None):
        self.cfg = cfg
        if R is None and cfg.r_file:
            with open(cfg.r_file, encoding="utf-8") as fh:
                R = IndexedTensor.from_json(fh.read())
        self.R = R if R is not None else build_r(cfg.n)
        if self.R.n != cfg.n:
            raise ValueError(f"the R-matrix file is for n={self.R.n}, not n={cfg.n}")

    @cached_property
    def bundle(self) -> RBundle:
        return RBundle.from_r(self.R, validate=False)

    @cached_property
    def engine(self) -> PairingEngine:
        return PairingEngine(self.bundle)

    @cached_property
    def constants(self):
        return derive_constants(self.bundle, self.engine)

    @cached_property
    def y_rules(self):
        return build_rules(self.bundle, "Y", fuel=self.cfg.fuel)

    @cached_property
    def x_rules(self):
        return build_rules(self.bundle, "X", fuel=self.cfg.fuel)

    @cached_property
    def forms(self) -> FormCalculus:
        return FormCalculus(self.bundle, self.y_rules, self.engine, self.constants, self.cfg.grade_cap)


def _ybe(s: Session) -> list[CheckResult]:
    w = ybe_witness(s.R)
    return [CheckResult("(95)", w is None, None, None if w is None else f"R12 R13 R23 != R23 R13 R12 at entry {w}")]


def _hecke(s: Session) -> list[CheckResult]:
    w = hecke_witness(s.R)
    out = [CheckResult("(96)", w is None, None, None if w is None else f"R - P R^-1 P != lambda P at R entry {w}")]
    Rt = second_inverse(s.R)
    a, b = second_inverse_check(s.R, Rt)
    out.append(CheckResult("(97) second inverse", a and b, None, None if a and b else f"contractions give identity: {a}, {b}"))
    D = d_matrix(Rt)
    bad = [idx for idx, v in sorted(D.entries.items()) if not v.is_monomial()]
    out.append(
        CheckResult("(97) D monomial", not bad, None, None if not bad else f"D entry {tuple(a + 1 for a in bad[0])} = {D[bad[0]]}")
    )
    return out


def _woronowicz(s: Session) -> list[CheckResult]:
    return verify_woronowicz(s.engine, s.cfg.degree)


def _relations(s: Session) -> list[CheckResult]:
    out = verify_functional_relations(s.engine, s.constants, s.cfg.degree)
    out += s.forms.gamma_relations()
    out += relations_vanish(s.y_rules, lambda w: word_text(w, s.cfg.n))
    out += quantum_lie_check(s.bundle, s.y_rules, s.x_rules)
    return out


def _overlaps(s: Session) -> list[CheckResult]:
    out = []
    for rules in (s.y_rules, s.x_rules):
        for r in check_overlaps(rules, 3, lambda w, m=rules.middle: word_text(w, s.cfg.n, m)):
            out.append(CheckResult(r.equation, r.passed, r.degree, r.witness, f"{rules.middle} presentation"))
    return out


def _cartan(s: Session) -> list[CheckResult]:
    return s.forms.cartan_suite(s.cfg.degree)


def _coactions(s: Session) -> list[CheckResult]:
    return coaction_check(s.y_rules, s.bundle, s.engine, s.cfg.degree)


def _tilded(s: Session) -> list[CheckResult]:
    return s.forms.tilded_convention(s.cfg.degree)


_RUNNERS = {
    "ybe": _ybe,
    "hecke": _hecke,
    "woronowicz": _woronowicz,
    "relations": _relations,
    "overlaps": _overlaps,
    "cartan": _cartan,
    "coactions": _coactions,
    "tilded": _tilded,
}


def run_suite(name: str, session: Session) -> list[CheckResult]:
    """Run one suite (or ``all``); setup failures become failed results with a witness."""
    names = SUITES if name == "all" else (name,)
    out = []
    for nm in names:
        if nm not in _RUNNERS:
            raise KeyError(nm)
        try:
            out += _RUNNERS[nm](session)
        except _SETUP_ERRORS as exc:
            out.append(CheckResult(f"{nm} setup", False, None, f"{type(exc).__name__}: {exc}"))
    return out


def classical_limit(bundle: RBundle, engine: PairingEngine | None = None, constants=None) -> list[CheckResult]:
    """Evaluations at q = 1.

    sigma squares to the identity, lambda vanishes, the Omega-J source term is examined, and
    chi-level objects must report their 1/lambda pole instead of evaluating silently.
    """
    engine = engine or PairingEngine(bundle)
    sc = constants or derive_constants(bundle, engine)
    out = []
    S = sc.sigma_matrix().map(lambda v: _as_rat(eval_at(v, 1)))
    ok = S @ S == type(S).identity(S.nrows)
    out.append(CheckResult("sigma(1)^2 = 1", ok, None, None if ok else "sigma at q=1 is not an involution"))
    lam1 = eval_at(bundle.lam, 1)
    out.append(CheckResult("lambda(1) = 0", lam1 == 0, None, None if lam1 == 0 else f"lambda(1) = {lam1}"))

    # the Omega-J source term (1 - R R21)/lambda: numerator and full term at q = 1
    R = bundle.mat("R")
    R21 = bundle.mat("R21")
    numer = type(R).identity(R.nrows) - R @ R21
    num_ok = all(eval_at(v, 1) == 0 for _, _, v in numer.items())
    out.append(CheckResult("(112) tail numerator at q=1", num_ok, None, None if num_ok else "1 - R R21 does not vanish at q=1"))
    tail = numer.scale(bundle.lam.inverse())
    witness = None
    for r, c, v in sorted(tail.items(), key=lambda t: (t[0], t[1])):
        val = eval_at(v, 1)
        if val != 0:
            n = bundle.n
            witness = f"entry ({r // n + 1},{r % n + 1};{c // n + 1},{c % n + 1}) -> {val}"
            break
    out.append(CheckResult("(112) tail at q=1", witness is None, None, witness))

    # chi carries a 1/lambda: evaluating its coefficients at q = 1 must raise a pole error
    fam = engine.functionals()
    unflagged = []
    for I, chi in enumerate(fam.chi):
        flagged = False
        for c in chi.terms.values():
            try:
                eval_at(c, 1)
            except PoleError:
                flagged = True
        if not flagged:
            unflagged.append(I)
    ok = not unflagged
    out.append(CheckResult("chi poles flagged", ok, None, None if ok else f"chi_{unflagged[0]} evaluated at q=1 without a pole"))
    return out


def _as_rat(x):
    return as_ratfunc(x)
